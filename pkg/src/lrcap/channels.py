"""CPTP maps for spin-network communication.

Choi convention: ``J = sum_ij |i><j| (x) Phi(|i><j|)`` with the input factor
first. A Kraus operator ``K`` corresponds to the Choi eigenvector with
components ``vec[i * d_out + o] = K[o, i]``.

The memory ``Q`` always sits in front of the network factors, and the
network factors follow the vertex order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .linalg import evolve_unitary, partial_trace
from .network import SpinNetwork, assemble_hamiltonian, dimension_of, embed_operator

TP_TOL = 1e-9
CHOI_DROP = 1e-11


@dataclass(frozen=True, eq=False)
class Channel:
    """A CPTP map given by Kraus operators of shape ``(output_dim, input_dim)``."""

    kraus: tuple = field(repr=False)
    input_dim: int
    output_dim: int

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise ValueError("Kraus list is empty")
        for k in ops:
            if k.shape != (self.output_dim, self.input_dim):
                raise ValueError(
                    f"Kraus operator shape {k.shape} != ({self.output_dim}, {self.input_dim})"
                )
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)
        defect = sum(k.conj().T @ k for k in ops) - np.eye(self.input_dim)
        if np.abs(defect).max() > TP_TOL:
            raise ValueError("Kraus operators are not trace preserving")

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray]) -> "Channel":
        kraus = [np.atleast_2d(np.asarray(k, dtype=complex)) for k in kraus]
        d_out, d_in = kraus[0].shape
        return cls(tuple(kraus), d_in, d_out)

    @classmethod
    def from_choi(cls, choi: np.ndarray, input_dim: int, output_dim: int) -> "Channel":
        return kraus_from_choi(choi, input_dim, output_dim)

    @cached_property
    def choi(self) -> np.ndarray:
        return choi_of(self)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply_channel(self, rho)

    def __len__(self):
        return len(self.kraus)


@dataclass(frozen=True, eq=False)
class Encoding:
    """Alice's encoding map on ``Q (x) A`` (memory first)."""

    channel: Channel
    memory_dim: int

    def __post_init__(self):
        ch = self.channel
        if ch.input_dim != ch.output_dim:
            raise ValueError("encoding must be square")
        if ch.input_dim % self.memory_dim:
            raise ValueError("encoding dimension is not a multiple of the memory dimension")

    @property
    def a_dim(self) -> int:
        return self.channel.input_dim // self.memory_dim


@dataclass(frozen=True, eq=False)
class SncInstance:
    """Network, encoding and transfer time defining one SNC channel."""

    net: SpinNetwork
    encoding: Encoding
    time: float

    def __post_init__(self):
        if self.encoding.a_dim != dimension_of(self.net, self.net.partition.a):
            raise ValueError("encoding does not act on a space of dimension M_Q * M_A")

    @property
    def memory_dim(self) -> int:
        return self.encoding.memory_dim


def apply_channel(ch: Channel, rho: np.ndarray) -> np.ndarray:
    """``sum_k K rho K^dag``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.input_dim, ch.input_dim):
        raise ValueError(f"input shape {rho.shape} does not match channel input {ch.input_dim}")
    k = np.stack(ch.kraus)
    return np.einsum("kab,bc,kdc->ad", k, rho, k.conj())


def choi_from_map(fn: Callable[[np.ndarray], np.ndarray], d_in: int) -> np.ndarray:
    """Choi matrix of a linear map given as a function on ``d_in x d_in`` matrices."""
    blocks = None
    for i in range(d_in):
        for j in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[i, j] = 1.0
            out = np.asarray(fn(e))
            if blocks is None:
                d_out = out.shape[0]
                blocks = np.zeros((d_in, d_out, d_in, d_out), dtype=complex)
            blocks[i, :, j, :] = out
    d_out = blocks.shape[1]
    return blocks.reshape(d_in * d_out, d_in * d_out)


def choi_of(ch: Channel) -> np.ndarray:
    """Choi matrix; its output marginal is the identity on the input."""
    k = np.stack(ch.kraus)  # (n, d_out, d_in)
    vecs = k.transpose(0, 2, 1).reshape(len(ch.kraus), -1)
    return vecs.T @ vecs.conj()


def kraus_from_choi(choi: np.ndarray, input_dim: int, output_dim: int) -> Channel:
    """Canonical Kraus list from the eigendecomposition of a Choi matrix.

    Eigenvalues below ``1e-11`` are discarded, so at most
    ``input_dim * output_dim`` operators come back.

    Raises:
        ValueError: if the Choi matrix is not positive semidefinite within
            ``1e-9`` or its output marginal is not the identity.
    """
    choi = np.asarray(choi, dtype=complex)
    n = input_dim * output_dim
    if choi.shape != (n, n):
        raise ValueError(f"Choi matrix shape {choi.shape} does not match {input_dim}x{output_dim}")
    choi = (choi + choi.conj().T) / 2
    evals, evecs = np.linalg.eigh(choi)
    if evals[0] < -TP_TOL:
        raise ValueError(f"map is not completely positive (eigenvalue {evals[0]:.3g})")
    marginal = partial_trace(choi, [input_dim, output_dim], [0])
    if np.abs(marginal - np.eye(input_dim)).max() > TP_TOL:
        raise ValueError("map is not trace preserving")
    keep = evals > CHOI_DROP
    kraus = [
        np.sqrt(lam) * vec.reshape(input_dim, output_dim).T
        for lam, vec in zip(evals[keep][::-1], evecs[:, keep].T[::-1])
    ]
    return Channel(tuple(kraus), input_dim, output_dim)


def constant_channel(sigma: np.ndarray, input_dim: int) -> Channel:
    """Replace every input by ``sigma``."""
    sigma = np.asarray(sigma, dtype=complex)
    return kraus_from_choi(np.kron(np.eye(input_dim), sigma), input_dim, sigma.shape[0])


def identity_channel(dim: int) -> Channel:
    return Channel((np.eye(dim, dtype=complex),), dim, dim)


def unitary_channel(u: np.ndarray) -> Channel:
    u = np.asarray(u, dtype=complex)
    return Channel((u,), u.shape[1], u.shape[0])


def compose(outer: Channel, inner: Channel) -> Channel:
    """``outer o inner``."""
    if outer.input_dim != inner.output_dim:
        raise ValueError("channel dimensions do not chain")
    kraus = [a @ b for a in outer.kraus for b in inner.kraus]
    return kraus_from_choi(choi_of(Channel(tuple(kraus), inner.input_dim, outer.output_dim)),
                           inner.input_dim, outer.output_dim)


# ---------------------------------------------------------------------------
# SNC composite


def _network_unitary(net: SpinNetwork, t: float) -> np.ndarray:
    return evolve_unitary(assemble_hamiltonian(net), t)


def _region_factors(net: SpinNetwork):
    part = net.partition
    return list(part.a), list(part.b), list(part.c)


def _apply_on_factors(kraus: Sequence[np.ndarray], rho: np.ndarray, dims, targets) -> np.ndarray:
    """``sum_k (K_k on targets) rho (K_k on targets)^dag`` via tensor contraction."""
    dims = list(dims)
    n = len(dims)
    targets = list(targets)
    rest = [k for k in range(n) if k not in targets]
    order = targets + rest
    d_t = int(np.prod([dims[k] for k in targets], dtype=int))
    d_r = int(np.prod([dims[k] for k in rest], dtype=int))
    t = rho.reshape(dims + dims).transpose(order + [n + k for k in order])
    t = t.reshape(d_t, d_r, d_t, d_r)
    out = np.zeros_like(t)
    for k in kraus:
        out += np.einsum("ab,bxcy,dc->axdy", k, t, k.conj())
    inv = list(np.argsort(order))
    out = out.reshape([dims[k] for k in order] * 2).transpose(inv + [n + i for i in inv])
    return out.reshape(rho.shape)


def encode_map(enc: Encoding, net: SpinNetwork) -> Callable[[np.ndarray], np.ndarray]:
    """The map ``rho_Q -> Tr_Q E_QA(rho_Q (x) tau_ABC)`` from Q to the network."""
    a, _, _ = _region_factors(net)
    dims = [enc.memory_dim] + list(net.local_dims)
    targets = [0] + [v + 1 for v in a]
    tau = net.initial_state

    def fn(rho_q):
        joint = np.kron(rho_q, tau)
        joint = _apply_on_factors(enc.channel.kraus, joint, dims, targets)
        return partial_trace(joint, dims, range(1, len(dims)))

    return fn


def psi_map(net: SpinNetwork, t: float, u: np.ndarray | None = None):
    """Network-to-B map ``X -> Tr_AC[U X U^dag]``."""
    u = _network_unitary(net, t) if u is None else u
    _, b, _ = _region_factors(net)

    def fn(x):
        return partial_trace(u @ x @ u.conj().T, net.local_dims, b)

    return fn


def psi_dp1_map(net: SpinNetwork, t: float, u: np.ndarray | None = None):
    """Network-to-B map ``X -> Tr_AC[U (tau_A (x) Tr_A X) U^dag]``."""
    u = _network_unitary(net, t) if u is None else u
    a, b, _ = _region_factors(net)
    dims = net.local_dims
    bc = [v for v in range(net.n_sites) if v not in a]
    tau_a = partial_trace(net.initial_state, dims, a)

    def fn(x):
        x_bc = partial_trace(x, dims, bc)
        joined = _place(tau_a, a, x_bc, bc, dims)
        return partial_trace(u @ joined @ u.conj().T, dims, b)

    return fn


def _place(op_a, a, op_b, b, dims):
    """``op_a (x) op_b`` with factors ``a`` and ``b`` put back in vertex order."""
    order = list(a) + list(b)
    n = len(order)
    joint = np.kron(op_a, op_b)
    sub_dims = [dims[k] for k in order]
    inv = list(np.argsort(order))
    joint = joint.reshape(sub_dims * 2).transpose(inv + [n + i for i in inv])
    total = int(np.prod(sub_dims, dtype=int))
    return joint.reshape(total, total)


def snc_channel(inst: SncInstance) -> Channel:
    """The Q-to-B channel obtained by encoding, evolving and tracing out QAC."""
    net = inst.net
    d_q = inst.memory_dim
    encode = encode_map(inst.encoding, net)
    evolve = psi_map(net, inst.time)
    choi = choi_from_map(lambda e: evolve(encode(e)), d_q)
    return kraus_from_choi(choi, d_q, dimension_of(net, net.partition.b))


def rho_b0(net: SpinNetwork, t: float) -> np.ndarray:
    """Bob's state when Alice does nothing."""
    return psi_map(net, t)(net.initial_state)


def rho_b1(net: SpinNetwork, t: float) -> np.ndarray:
    """Bob's state when A starts decoupled from BC."""
    return psi_dp1_map(net, t)(net.initial_state)


def depolarizing_phi0(net: SpinNetwork, t: float, memory_dim: int) -> Channel:
    """Constant channel onto :func:`rho_b0`."""
    return constant_channel(rho_b0(net, t), memory_dim)


def depolarizing_phi1(net: SpinNetwork, t: float, memory_dim: int) -> Channel:
    """Constant channel onto :func:`rho_b1`."""
    return constant_channel(rho_b1(net, t), memory_dim)


def swap_operator(memory_dim: int, a_dim: int) -> np.ndarray:
    if memory_dim != a_dim:
        raise ValueError("swap encoding needs a memory isomorphic to A")
    d = memory_dim
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def swap_encoding(memory_dim: int, a_dim: int) -> Encoding:
    """Unitary swap of the memory with region A."""
    return Encoding(unitary_channel(swap_operator(memory_dim, a_dim)), memory_dim)


def identity_encoding(memory_dim: int, a_dim: int) -> Encoding:
    return Encoding(identity_channel(memory_dim * a_dim), memory_dim)


def classical_encoding_family(maps: Sequence[Channel]) -> Encoding:
    """Dephase Q in the computational basis, then apply ``maps[alpha]`` to A.

    The memory dimension equals the number of maps.
    """
    if not maps:
        raise ValueError("need at least one map")
    d_a = maps[0].input_dim
    for m in maps:
        if m.input_dim != d_a or m.output_dim != d_a:
            raise ValueError("all maps must be square on the same dimension")
    d_q = len(maps)
    kraus = []
    for alpha, m in enumerate(maps):
        proj = np.zeros((d_q, d_q), dtype=complex)
        proj[alpha, alpha] = 1.0
        kraus.extend(np.kron(proj, k) for k in m.kraus)
    return Encoding(Channel(tuple(kraus), d_q * d_a, d_q * d_a), d_q)


def local_encoding_map(enc: Encoding, rho_q: np.ndarray) -> Channel:
    """Alice's effective map on A for a fixed message: ``Tr_Q E_QA(rho_Q (x) .)``."""
    rho_q = np.asarray(rho_q, dtype=complex)
    d_q, d_a = enc.memory_dim, enc.a_dim
    if rho_q.shape != (d_q, d_q):
        raise ValueError("message state does not match the memory dimension")

    def fn(x):
        out = apply_channel(enc.channel, np.kron(rho_q, x))
        return partial_trace(out, [d_q, d_a], [1])

    return kraus_from_choi(choi_from_map(fn, d_a), d_a, d_a)


def reduced_encoding(enc: Encoding, rho_q: np.ndarray, net: SpinNetwork) -> Channel:
    """:func:`local_encoding_map` lifted to the whole network (identity on BC)."""
    local = local_encoding_map(enc, rho_q)
    a = list(net.partition.a)
    return Channel(
        tuple(embed_operator(k, net.local_dims, a) for k in local.kraus),
        net.dimension,
        net.dimension,
    )


def encoding_channel(inst: SncInstance) -> Channel:
    """The Q-to-network map ``E`` as a channel."""
    enc = encode_map(inst.encoding, inst.net)
    d = inst.net.dimension
    return kraus_from_choi(choi_from_map(enc, inst.memory_dim), inst.memory_dim, d)


def psi_channel(net: SpinNetwork, t: float) -> Channel:
    d = net.dimension
    return kraus_from_choi(choi_from_map(psi_map(net, t), d), d,
                           dimension_of(net, net.partition.b))


def psi_dp1_channel(net: SpinNetwork, t: float) -> Channel:
    d = net.dimension
    return kraus_from_choi(choi_from_map(psi_dp1_map(net, t), d), d,
                           dimension_of(net, net.partition.b))

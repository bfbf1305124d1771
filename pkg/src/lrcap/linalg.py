"""Dense linear algebra for small spin networks.

States and operators are plain complex ``ndarray`` objects; where a tensor
structure matters the factor dimensions are passed alongside as ``dims``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .network import SpinNetwork, assemble_hamiltonian, embed_operator

PSD_TOL = 1e-10


def is_hermitian(a: np.ndarray, rtol: float = 1e-12) -> bool:
    return np.linalg.norm(a - a.conj().T) <= rtol * max(1.0, np.linalg.norm(a))


def evolve_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i h t)`` via the Hermitian eigendecomposition of ``h``."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValueError("Hamiltonian is not Hermitian")
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def heisenberg_evolve(a: np.ndarray, h: np.ndarray, t: float) -> np.ndarray:
    """Heisenberg-picture operator ``U(t)^dag a U(t)``."""
    a = np.asarray(a, dtype=complex)
    if a.shape != h.shape:
        raise ValueError(f"operator shape {a.shape} does not match Hamiltonian {h.shape}")
    u = evolve_unitary(h, t)
    return u.conj().T @ a @ u


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    Kept factors stay in their original relative order regardless of the
    order given in ``keep``.
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 0 <= k < n:
            raise ValueError(f"invalid factor index {k}")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"matrix shape {rho.shape} does not match dims {dims}")
    if len(keep) == n:
        return np.array(rho, dtype=complex)
    traced = [k for k in range(n) if k not in keep]
    t = np.asarray(rho).reshape(dims + dims)
    # bring traced row/col axes to the end, then contract them pairwise
    perm = keep + [n + k for k in keep] + traced + [n + k for k in traced]
    t = t.transpose(perm)
    d_keep = int(np.prod([dims[k] for k in keep], dtype=int))
    d_tr = int(np.prod([dims[k] for k in traced], dtype=int))
    t = t.reshape(d_keep, d_keep, d_tr, d_tr)
    return np.trace(t, axis1=2, axis2=3)


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values."""
    a = np.asarray(a)
    if is_hermitian(a, 1e-13):
        return float(np.abs(np.linalg.eigvalsh((a + a.conj().T) / 2)).sum())
    return float(np.linalg.svd(a, compute_uv=False).sum())


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("states have different dimensions")
    return 0.5 * trace_norm(rho - sigma)


def schmidt_decompose(psi: np.ndarray, dims: Sequence[int], cut: Sequence[int]):
    """Schmidt decomposition of a pure state across ``cut | rest``.

    Args:
        psi: normalized state vector on ``prod(dims)``.
        dims: factor dimensions.
        cut: factors on the left side of the bipartition.

    Returns:
        ``(coefficients, left, right)`` where ``left[:, k]`` and
        ``right[:, k]`` are the k-th Schmidt vectors and the coefficients are
        nonincreasing. Vanishing coefficients (below 1e-14) are dropped.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    dims = [int(d) for d in dims]
    if psi.size != int(np.prod(dims)):
        raise ValueError("state size does not match dims")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("state is not normalized")
    left = sorted(set(cut))
    right = [k for k in range(len(dims)) if k not in left]
    t = psi.reshape(dims).transpose(left + right)
    d_l = int(np.prod([dims[k] for k in left], dtype=int))
    mat = t.reshape(d_l, -1)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(s > 1e-14))
    return s[:rank], u[:, :rank], vh[:rank].T


def commutator_norm_exact(
    a: np.ndarray,
    b: np.ndarray,
    net: SpinNetwork,
    t: float,
    *,
    region_a=None,
    region_b=None,
    hamiltonian: np.ndarray | None = None,
) -> float:
    """Operator norm of ``[a(t), b]`` on the full network.

    ``a`` acts on ``region_a`` (Alice's region by default) and is evolved
    under the assembled Hamiltonian; ``b`` acts on ``region_b`` (Bob's).
    A precomputed Hamiltonian can be passed to skip reassembly.
    """
    region_a = net.partition.a if region_a is None else region_a
    region_b = net.partition.b if region_b is None else region_b
    va, vb = tuple(region_a), tuple(region_b)
    if set(va) & set(vb):
        raise ValueError("regions of the two operators overlap")
    h = assemble_hamiltonian(net) if hamiltonian is None else hamiltonian
    big_a = embed_operator(np.asarray(a, dtype=complex), net.local_dims, va)
    big_b = embed_operator(np.asarray(b, dtype=complex), net.local_dims, vb)
    a_t = heisenberg_evolve(big_a, h, t)
    return operator_norm(a_t @ big_b - big_b @ a_t)


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())

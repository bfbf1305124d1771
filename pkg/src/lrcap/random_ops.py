"""Seeded random states, unitaries and channels.

Every generator here is ``numpy.random.Generator(numpy.random.Philox(seed))``,
a counter-based 64-bit generator, so a seed pins down the whole stream.
"""

from __future__ import annotations

import numpy as np

from .channels import Channel


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def _ginibre(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-random unitary (QR with phase fix)."""
    rng = make_rng(rng)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure_state(dim: int, rng) -> np.ndarray:
    rng = make_rng(rng)
    v = _ginibre(rng, dim, 1).ravel()
    return v / np.linalg.norm(v)


def random_density(dim: int, rng, rank: int | None = None) -> np.ndarray:
    """Induced-measure mixed state of the given rank (full rank by default)."""
    rng = make_rng(rng)
    g = _ginibre(rng, dim, rank or dim)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_channel(input_dim: int, output_dim: int, rng, n_kraus: int = 2) -> Channel:
    """Channel from a random isometry split into ``n_kraus`` blocks.

    The isometry needs ``n_kraus * output_dim >= input_dim``.
    """
    if n_kraus * output_dim < input_dim:
        raise ValueError(
            f"{n_kraus} Kraus operators of size {output_dim}x{input_dim} cannot be trace preserving"
        )
    rng = make_rng(rng)
    q, _ = np.linalg.qr(_ginibre(rng, n_kraus * output_dim, input_dim))
    kraus = [q[k * output_dim : (k + 1) * output_dim] for k in range(n_kraus)]
    return Channel(tuple(kraus), input_dim, output_dim)


def random_product_state(dims, rng, pure: bool = True) -> np.ndarray:
    """Tensor product of independent single-site states."""
    rng = make_rng(rng)
    rho = np.ones((1, 1), dtype=complex)
    for d in dims:
        if pure:
            v = random_pure_state(d, rng)
            site = np.outer(v, v.conj())
        else:
            site = random_density(d, rng)
        rho = np.kron(rho, site)
    return rho

"""Ready-made spin chains."""

from __future__ import annotations

import numpy as np

from .network import Graph, HamiltonianTerm, Partition, SpinNetwork

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_string(label: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for ch in label:
        out = np.kron(out, PAULI[ch])
    return out


HEISENBERG_BOND = pauli_string("XX") + pauli_string("YY") + pauli_string("ZZ")


def chain_network(
    n: int,
    bond: np.ndarray = HEISENBERG_BOND,
    onsite: np.ndarray | None = None,
    a=None,
    b=None,
    state: np.ndarray | None = None,
    local_dim: int = 2,
) -> SpinNetwork:
    """Open chain with the same two-site term on every edge.

    Alice holds the first site and Bob the last unless told otherwise; the
    initial state defaults to the maximally mixed state.
    """
    a = (0,) if a is None else tuple(a)
    b = (n - 1,) if b is None else tuple(b)
    c = tuple(v for v in range(n) if v not in a and v not in b)
    terms = [HamiltonianTerm((i, i + 1), bond) for i in range(n - 1)]
    if onsite is not None:
        terms += [HamiltonianTerm((i,), onsite) for i in range(n)]
    dim = local_dim**n
    if state is None:
        state = np.eye(dim, dtype=complex) / dim
    return SpinNetwork(Graph.path(n), (local_dim,) * n, terms, Partition(a, b, c), state)

"""Spin-network geometry and Hamiltonian assembly.

Vertex 0 is the most significant tensor factor everywhere in the package:
a basis state ``|s_0 s_1 ... s_{n-1}>`` has flat index
``s_0 * (d_1 * ... * d_{n-1}) + ... + s_{n-1}``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: Distance between vertices with no connecting path.
UNREACHABLE = math.inf

HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0 .. vertex_count - 1``."""

    vertex_count: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("vertex_count must be positive")
        normalized = set()
        for edge in self.edges:
            x, y = (int(v) for v in edge)
            if x == y:
                raise ValueError(f"self-loop at vertex {x}")
            for v in (x, y):
                if not 0 <= v < self.vertex_count:
                    raise ValueError(f"edge endpoint {v} out of range")
            normalized.add((min(x, y), max(x, y)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    def neighbors(self, x: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == x:
                out.append(b)
            elif b == x:
                out.append(a)
        return sorted(out)

    def check_vertex(self, x: int) -> None:
        if not 0 <= x < self.vertex_count:
            raise ValueError(f"invalid vertex index {x}")


@dataclass(frozen=True)
class Region:
    """A set of vertices stored as a sorted tuple."""

    vertices: tuple = ()

    def __post_init__(self):
        verts = tuple(int(v) for v in self.vertices)
        if len(set(verts)) != len(verts):
            raise ValueError(f"duplicate vertices in region {verts}")
        object.__setattr__(self, "vertices", tuple(sorted(verts)))

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __contains__(self, x):
        return x in self.vertices

    def isdisjoint(self, other: "Region") -> bool:
        return set(self.vertices).isdisjoint(other.vertices)


def _as_region(x) -> Region:
    return x if isinstance(x, Region) else Region(tuple(x))


@dataclass(frozen=True)
class Partition:
    """Alice's region ``a``, Bob's region ``b`` and the rest ``c``."""

    a: Region
    b: Region
    c: Region = Region()

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _as_region(getattr(self, name)))
        if not len(self.a) or not len(self.b):
            raise ValueError("regions a and b must be non-empty")
        sets = [set(self.a), set(self.b), set(self.c)]
        if sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2]:
            raise ValueError("partition regions overlap")

    def validate(self, g: Graph) -> None:
        covered = set(self.a) | set(self.b) | set(self.c)
        if covered != set(range(g.vertex_count)):
            raise ValueError("partition does not cover the vertex set")
        if region_distance(g, self.a, self.b) < 1:
            raise ValueError("regions a and b must be at positive distance")


@dataclass(frozen=True)
class HamiltonianTerm:
    """A Hermitian operator acting on the sites of ``support``.

    The matrix uses the support's sorted vertex order for its tensor factors.
    """

    support: Region
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "support", _as_region(self.support))
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("term matrix must be square")
        scale = max(np.linalg.norm(m), 1.0)
        if np.linalg.norm(m - m.conj().T) > HERMITIAN_RTOL * scale:
            raise ValueError(f"term on {self.support.vertices} is not Hermitian")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class SpinNetwork:
    """Graph, local dimensions, Hamiltonian terms, partition and initial state."""

    graph: Graph
    local_dims: tuple
    terms: tuple
    partition: Partition
    initial_state: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.local_dims)
        if len(dims) != self.graph.vertex_count or min(dims) < 1:
            raise ValueError("need one positive local dimension per vertex")
        object.__setattr__(self, "local_dims", dims)
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            for v in term.support:
                self.graph.check_vertex(v)
            expected = int(np.prod([dims[v] for v in term.support]))
            if term.matrix.shape[0] != expected:
                raise ValueError(
                    f"term on {term.support.vertices} has dimension "
                    f"{term.matrix.shape[0]}, expected {expected}"
                )
        self.partition.validate(self.graph)
        rho = np.array(self.initial_state, dtype=complex)
        if rho.shape != (self.dimension, self.dimension):
            raise ValueError("initial state has wrong dimension")
        _check_density(rho)
        rho.setflags(write=False)
        object.__setattr__(self, "initial_state", rho)

    @property
    def dimension(self) -> int:
        return int(np.prod(self.local_dims))

    @property
    def n_sites(self) -> int:
        return self.graph.vertex_count

    def with_state(self, rho: np.ndarray) -> "SpinNetwork":
        return SpinNetwork(self.graph, self.local_dims, self.terms, self.partition, rho)

    def with_terms(self, terms: Iterable[HamiltonianTerm]) -> "SpinNetwork":
        return SpinNetwork(
            self.graph, self.local_dims, tuple(terms), self.partition, self.initial_state
        )


def _check_density(rho: np.ndarray, tol: float = 1e-10) -> None:
    if np.linalg.norm(rho - rho.conj().T) > tol * max(1.0, np.linalg.norm(rho)):
        raise ValueError("state is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError("state does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("state is not positive semidefinite")


def shortest_path_distance(g: Graph, x: int, y: int) -> float:
    """Number of edges on a shortest path from ``x`` to ``y``.

    Returns :data:`UNREACHABLE` when the vertices lie in different components.
    """
    g.check_vertex(x)
    g.check_vertex(y)
    return _bfs(g, x)[y]


def _bfs(g: Graph, source: int) -> list:
    dist = [UNREACHABLE] * g.vertex_count
    dist[source] = 0
    adjacency = {v: g.neighbors(v) for v in range(g.vertex_count)}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adjacency[v]:
            if dist[w] == UNREACHABLE:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def _nonempty(x) -> Region:
    region = _as_region(x)
    if not len(region):
        raise ValueError("region must be non-empty")
    return region


def region_distance(g: Graph, x, y) -> float:
    """Minimum geodesic distance between a vertex of ``x`` and one of ``y``."""
    x, y = _nonempty(x), _nonempty(y)
    best = UNREACHABLE
    for v in x:
        g.check_vertex(v)
        dist = _bfs(g, v)
        best = min(best, min(dist[w] for w in y))
    return best


def region_diameter(g: Graph, x) -> float:
    """Largest geodesic distance between two vertices of ``x``.

    This is the usual diameter; a literal max-min reading over the same set
    would always be zero.
    """
    x = _nonempty(x)
    best = 0
    for v in x:
        g.check_vertex(v)
        dist = _bfs(g, v)
        best = max(best, max(dist[w] for w in x))
    return best


def dimension_of(net: SpinNetwork, x) -> int:
    """Hilbert-space dimension of a region (1 for the empty region)."""
    return int(np.prod([net.local_dims[v] for v in _as_region(x)], dtype=int))


def embed_operator(op: np.ndarray, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Lift ``op`` acting on factors ``targets`` (in that order) to the full space."""
    dims = list(dims)
    targets = list(targets)
    rest = [k for k in range(len(dims)) if k not in targets]
    d_t = int(np.prod([dims[k] for k in targets], dtype=int))
    d_r = int(np.prod([dims[k] for k in rest], dtype=int))
    if op.shape != (d_t, d_t):
        raise ValueError(f"operator shape {op.shape} does not match targets {targets}")
    full = np.kron(op, np.eye(d_r))
    order = targets + rest
    n = len(dims)
    shape = [dims[k] for k in order] * 2
    full = full.reshape(shape)
    inv = np.argsort(order)
    full = full.transpose(list(inv) + [n + i for i in inv])
    total = d_t * d_r
    return full.reshape(total, total)


def assemble_hamiltonian(net: SpinNetwork) -> np.ndarray:
    """Sum of all terms, each embedded as identity outside its support."""
    h = np.zeros((net.dimension, net.dimension), dtype=complex)
    for term in net.terms:
        h += embed_operator(term.matrix, net.local_dims, term.support.vertices)
    return h


def finite_range_check(net: SpinNetwork, dbar: int) -> bool:
    """True iff every term's support has diameter at most ``dbar``."""
    if dbar < 1:
        raise ValueError("dbar must be at least 1")
    return all(region_diameter(net.graph, t.support) <= dbar for t in net.terms)

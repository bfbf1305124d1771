import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from lrcap.models import PAULI, chain_network
from lrcap.network import (
    UNREACHABLE,
    Graph,
    HamiltonianTerm,
    Partition,
    Region,
    SpinNetwork,
    assemble_hamiltonian,
    dimension_of,
    embed_operator,
    finite_range_check,
    region_diameter,
    region_distance,
    shortest_path_distance,
)

Z = PAULI["Z"]


def make_net(n, terms=(), dims=None, part=None):
    dims = dims or (2,) * n
    d = int(np.prod(dims))
    part = part or Partition((0,), (n - 1,), tuple(range(1, n - 1)))
    return SpinNetwork(Graph.path(n), dims, tuple(terms), part, np.eye(d) / d)


class TestDistances:
    def test_path_endpoints(self):
        assert shortest_path_distance(Graph.path(3), 0, 2) == 2

    def test_self_distance(self):
        g = Graph(4, [(0, 1), (2, 3)])
        for x in range(4):
            assert shortest_path_distance(g, x, x) == 0

    def test_unreachable(self):
        assert shortest_path_distance(Graph(2, []), 0, 1) == UNREACHABLE

    def test_invalid_vertex(self):
        with pytest.raises(ValueError):
            shortest_path_distance(Graph.path(3), 0, 5)

    def test_region_distance_examples(self):
        g = Graph.path(3)
        assert region_distance(g, [0], [2]) == 2
        assert region_distance(g, [0, 1], [1, 2]) == 0
        assert region_distance(g, [0], [1, 2]) == 1

    def test_region_distance_empty(self):
        with pytest.raises(ValueError):
            region_distance(Graph.path(3), [], [1])

    def test_diameter_examples(self):
        g = Graph.path(3)
        assert region_diameter(g, [1]) == 0
        assert region_diameter(g, [0, 2]) == 2
        assert region_diameter(Graph(3, [(0, 1)]), [0, 2]) == UNREACHABLE

    def test_diameter_empty(self):
        with pytest.raises(ValueError):
            region_diameter(Graph.path(3), [])


@st.composite
def connected_graphs(draw):
    n = draw(st.integers(1, 10))
    # random spanning tree plus extra edges keeps the graph connected
    edges = {(draw(st.integers(0, i - 1)), i) for i in range(1, n)}
    pairs = list(itertools.combinations(range(n), 2))
    if pairs:
        edges |= set(draw(st.lists(st.sampled_from(pairs), max_size=10)))
    return Graph(n, edges)


@settings(max_examples=60, deadline=None)
@given(connected_graphs())
def test_metric_axioms(g):
    n = g.vertex_count
    d = [[shortest_path_distance(g, x, y) for y in range(n)] for x in range(n)]
    for x, y in itertools.product(range(n), repeat=2):
        assert d[x][y] == d[y][x]
        assert (d[x][y] == 0) == (x == y)
        for z in range(n):
            assert d[x][z] <= d[x][y] + d[y][z]


class TestTypes:
    def test_region_sorted_and_unique(self):
        assert Region((2, 0, 1)).vertices == (0, 1, 2)
        with pytest.raises(ValueError):
            Region((1, 1))

    def test_partition_overlap_rejected(self):
        with pytest.raises(ValueError):
            Partition((0, 1), (1, 2))

    def test_partition_adjacent_is_fine(self):
        Partition((0,), (1,)).validate(Graph.path(2))

    def test_non_hermitian_term(self):
        with pytest.raises(ValueError):
            HamiltonianTerm((0,), np.array([[0, 1], [0, 0]], dtype=complex))

    def test_bad_state(self):
        with pytest.raises(ValueError):
            SpinNetwork(Graph.path(2), (2, 2), (), Partition((0,), (1,)), np.eye(4))


def test_dimension_of_examples():
    net = make_net(3)
    assert dimension_of(net, [0, 1]) == 4
    assert dimension_of(net, []) == 1
    mixed = make_net(2, dims=(2, 3))
    assert dimension_of(mixed, [0, 1]) == 6


class TestHamiltonian:
    def test_empty(self):
        assert_allclose(assemble_hamiltonian(make_net(2)), np.zeros((4, 4)))

    def test_site_zero_is_most_significant(self):
        net = make_net(2, [HamiltonianTerm((0,), Z)])
        assert_allclose(assemble_hamiltonian(net), np.diag([1, 1, -1, -1]))

    def test_linearity(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        t1 = HamiltonianTerm((0, 2), m + m.conj().T)
        t2 = HamiltonianTerm((1,), PAULI["X"])
        both = assemble_hamiltonian(make_net(3, [t1, t2]))
        split = assemble_hamiltonian(make_net(3, [t1])) + assemble_hamiltonian(make_net(3, [t2]))
        assert_allclose(both, split, atol=1e-14)

    def test_hermitian(self):
        h = assemble_hamiltonian(chain_network(4, onsite=PAULI["Y"]))
        assert np.linalg.norm(h - h.conj().T) <= 1e-12 * np.linalg.norm(h)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            make_net(2, [HamiltonianTerm((0,), np.eye(3))])

    def test_embed_nonadjacent(self):
        op = np.kron(PAULI["X"], PAULI["Z"])
        full = embed_operator(op, (2, 2, 2), (0, 2))
        expected = np.kron(np.kron(PAULI["X"], np.eye(2)), PAULI["Z"])
        assert_allclose(full, expected)


class TestFiniteRange:
    def test_nearest_neighbour(self):
        assert finite_range_check(chain_network(4), 1)

    def test_three_site_term(self):
        net = make_net(3, [HamiltonianTerm((0, 1, 2), np.eye(8))])
        assert not finite_range_check(net, 1)

    def test_no_terms(self):
        assert finite_range_check(make_net(3), 1)


def test_partition_distance_at_least_one():
    for n in range(2, 6):
        net = chain_network(n)
        assert region_distance(net.graph, net.partition.a, net.partition.b) >= 1

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.linalg import expm

from lrcap.linalg import (
    commutator_norm_exact,
    evolve_unitary,
    heisenberg_evolve,
    ket,
    operator_norm,
    partial_trace,
    projector,
    schmidt_decompose,
    trace_distance,
    trace_norm,
)
from lrcap.models import PAULI, chain_network
from lrcap.network import Graph, HamiltonianTerm, Partition, SpinNetwork
from lrcap.random_ops import random_density, random_unitary

X, Y, Z, I2 = PAULI["X"], PAULI["Y"], PAULI["Z"], PAULI["I"]
seeds = st.integers(0, 2**32 - 1)


class TestEvolution:
    def test_zero_hamiltonian(self):
        assert_allclose(evolve_unitary(np.zeros((3, 3)), 1.7), np.eye(3))

    def test_sigma_z_at_pi(self):
        assert_allclose(evolve_unitary(Z, math.pi), -np.eye(2), atol=1e-14)

    def test_group_law(self):
        h = random_density(4, 1) * 3
        u = evolve_unitary(h, 0.3) @ evolve_unitary(h, 1.1)
        assert_allclose(u, evolve_unitary(h, 1.4), atol=1e-10)

    def test_matches_expm(self):
        h = random_density(5, 2)
        assert_allclose(evolve_unitary(h, 0.7), expm(-0.7j * h), atol=1e-12)

    def test_non_hermitian(self):
        with pytest.raises(ValueError):
            evolve_unitary(np.array([[0, 1], [0, 0]]), 1.0)

    def test_heisenberg_examples(self):
        a = random_density(2, 5)
        assert_allclose(heisenberg_evolve(a, Z, 0.0), a, atol=1e-15)
        assert_allclose(heisenberg_evolve(Z, Z, 2.3), Z, atol=1e-14)

    @pytest.mark.parametrize("t", [0.1, 0.9, 2.5])
    def test_heisenberg_sigma_x(self, t):
        # closed form for exp(i t Z) X exp(-i t Z)
        expected = math.cos(2 * t) * X - math.sin(2 * t) * Y
        assert_allclose(heisenberg_evolve(X, Z, t), expected, atol=1e-12)

    def test_heisenberg_dimension_mismatch(self):
        with pytest.raises(ValueError):
            heisenberg_evolve(np.eye(2), np.eye(4), 1.0)

    @settings(max_examples=25, deadline=None)
    @given(seeds, st.floats(-3, 3))
    def test_spectrum_preserved(self, seed, t):
        h = random_density(4, seed)
        a = random_density(4, seed + 1)
        evolved = heisenberg_evolve(a, h, t)
        assert_allclose(np.linalg.eigvalsh(evolved), np.linalg.eigvalsh(a), atol=1e-10)


class TestPartialTrace:
    def test_product(self):
        rho = projector(ket(0, 4))
        assert_allclose(partial_trace(rho, (2, 2), [0]), projector(ket(0, 2)))

    def test_bell(self):
        bell = (ket(0, 4) + ket(3, 4)) / math.sqrt(2)
        assert_allclose(partial_trace(projector(bell), (2, 2), [0]), I2 / 2)

    def test_keep_everything(self):
        rho = random_density(6, 3)
        assert_allclose(partial_trace(rho, (2, 3), [0, 1]), rho)

    def test_invalid_index(self):
        with pytest.raises(ValueError):
            partial_trace(np.eye(4) / 4, (2, 2), [2])

    def test_matches_kron_factor(self):
        a, b, c = random_density(2, 1), random_density(3, 2), random_density(2, 3)
        rho = np.kron(np.kron(a, b), c)
        assert_allclose(partial_trace(rho, (2, 3, 2), [1]), b, atol=1e-14)
        assert_allclose(partial_trace(rho, (2, 3, 2), [2, 0]), np.kron(a, c), atol=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_trace_positivity_and_composition(self, seed):
        dims = (2, 3, 2)
        rho = random_density(12, seed)
        a = partial_trace(rho, dims, [0])
        assert abs(np.trace(a) - 1) < 1e-12
        assert np.linalg.eigvalsh(a).min() > -1e-10
        ab = partial_trace(rho, dims, [0, 1])
        assert_allclose(partial_trace(ab, (2, 3), [0]), a, atol=1e-12)


class TestNorms:
    def test_operator_norm_examples(self):
        assert operator_norm(np.eye(4)) == pytest.approx(1)
        assert operator_norm(X) == pytest.approx(1)
        assert operator_norm(2 * projector(ket(1, 3))) == pytest.approx(2)

    def test_trace_norm_examples(self):
        assert trace_norm(np.eye(5)) == pytest.approx(5)
        assert trace_norm(projector(ket(0, 3))) == pytest.approx(1)
        assert trace_norm(np.zeros((3, 3))) == 0

    def test_trace_norm_non_hermitian(self):
        m = np.array([[0, 2], [0, 0]], dtype=complex)
        assert trace_norm(m) == pytest.approx(2)

    def test_trace_distance_examples(self):
        rho = random_density(3, 0)
        assert trace_distance(rho, rho) == pytest.approx(0, abs=1e-15)
        assert trace_distance(projector(ket(0, 2)), projector(ket(1, 2))) == pytest.approx(1)
        assert trace_distance(projector(ket(0, 2)), I2 / 2) == pytest.approx(0.5)

    def test_trace_distance_mismatch(self):
        with pytest.raises(ValueError):
            trace_distance(np.eye(2) / 2, np.eye(3) / 3)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_trace_distance_metric_and_invariance(self, seed):
        r, s, w = (random_density(3, seed + k) for k in range(3))
        u = random_unitary(3, seed + 3)
        d_rs = trace_distance(r, s)
        assert 0 <= d_rs <= 1 + 1e-12
        assert d_rs == pytest.approx(trace_distance(s, r), abs=1e-12)
        assert d_rs <= trace_distance(r, w) + trace_distance(w, s) + 1e-12
        conj = lambda m: u @ m @ u.conj().T
        assert trace_distance(conj(r), conj(s)) == pytest.approx(d_rs, abs=1e-10)


class TestSchmidt:
    def test_product(self):
        coeffs, _, _ = schmidt_decompose(np.kron(ket(0, 2), ket(1, 3)), (2, 3), [0])
        assert_allclose(coeffs, [1.0])

    def test_bell(self):
        bell = (ket(0, 4) + ket(3, 4)) / math.sqrt(2)
        coeffs, _, _ = schmidt_decompose(bell, (2, 2), [0])
        assert_allclose(coeffs, [1 / math.sqrt(2)] * 2)

    def test_rank_and_reconstruction(self):
        rng = np.random.default_rng(1)
        psi = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        psi /= np.linalg.norm(psi)
        coeffs, left, right = schmidt_decompose(psi, (3, 4), [0])
        assert len(coeffs) <= 3
        rebuilt = sum(c * np.kron(left[:, k], right[:, k]) for k, c in enumerate(coeffs))
        assert_allclose(rebuilt, psi, atol=1e-12)

    def test_unnormalized(self):
        with pytest.raises(ValueError):
            schmidt_decompose(np.ones(4), (2, 2), [0])


def two_qubit_net(terms):
    return SpinNetwork(Graph.path(2), (2, 2), tuple(terms), Partition((0,), (1,)), np.eye(4) / 4)


class TestCommutator:
    def test_no_hamiltonian(self):
        assert commutator_norm_exact(X, X, two_qubit_net([]), 3.0) == pytest.approx(0, abs=1e-14)

    def test_time_zero(self):
        net = two_qubit_net([HamiltonianTerm((0, 1), np.kron(Z, Z))])
        assert commutator_norm_exact(X, X, net, 0.0) == pytest.approx(0, abs=1e-14)

    @pytest.mark.parametrize("t", [0.05, 0.3, 0.7, 1.4])
    def test_zz_coupling(self, t):
        net = two_qubit_net([HamiltonianTerm((0, 1), np.kron(Z, Z))])
        assert commutator_norm_exact(X, X, net, t) == pytest.approx(2 * abs(math.sin(2 * t)), abs=1e-12)

    def test_overlapping_regions(self):
        net = two_qubit_net([])
        with pytest.raises(ValueError):
            commutator_norm_exact(X, X, net, 1.0, region_a=(0,), region_b=(0,))

    @settings(max_examples=15, deadline=None)
    @given(seeds, st.floats(0, 4))
    def test_trivial_ceiling(self, seed, t):
        net = chain_network(3)
        a, b = random_density(2, seed), random_density(2, seed + 1)
        value = commutator_norm_exact(a, b, net, t)
        assert value <= 2 * operator_norm(a) * operator_norm(b) + 1e-12

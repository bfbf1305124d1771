import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from lrcap.channels import (
    Channel,
    Encoding,
    SncInstance,
    apply_channel,
    choi_from_map,
    choi_of,
    classical_encoding_family,
    compose,
    constant_channel,
    depolarizing_phi0,
    depolarizing_phi1,
    encoding_channel,
    identity_channel,
    identity_encoding,
    kraus_from_choi,
    local_encoding_map,
    psi_channel,
    psi_dp1_channel,
    reduced_encoding,
    rho_b0,
    rho_b1,
    snc_channel,
    swap_encoding,
    swap_operator,
    unitary_channel,
)
from lrcap.linalg import evolve_unitary, ket, partial_trace, projector
from lrcap.models import PAULI, chain_network
from lrcap.network import assemble_hamiltonian
from lrcap.random_ops import (
    make_rng,
    random_channel,
    random_density,
    random_product_state,
    random_unitary,
)

seeds = st.integers(0, 2**32 - 1)


def basis_action(ch):
    """Outputs on every matrix unit; two channels are equal iff these agree."""
    d = ch.input_dim
    outs = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1
            outs.append(apply_channel(ch, e))
    return np.array(outs)


def three_qubit(state=None, onsite=None):
    return chain_network(3, onsite=onsite, state=state)


class TestBasics:
    def test_identity(self):
        rho = random_density(3, 0)
        assert_allclose(apply_channel(identity_channel(3), rho), rho)

    def test_constant(self):
        sigma = random_density(2, 1)
        ch = constant_channel(sigma, 3)
        for seed in range(5):
            assert_allclose(apply_channel(ch, random_density(3, seed)), sigma, atol=1e-12)

    def test_unitary_preserves_spectrum(self):
        rho = random_density(4, 2)
        out = apply_channel(unitary_channel(random_unitary(4, 3)), rho)
        assert_allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_channel(identity_channel(2), np.eye(3) / 3)

    def test_not_trace_preserving(self):
        with pytest.raises(ValueError):
            Channel.from_kraus([0.5 * np.eye(2)])

    def test_random_channel_too_few_kraus(self):
        with pytest.raises(ValueError):
            random_channel(3, 1, make_rng(0), n_kraus=2)

    def test_trace_preserved(self):
        ch = random_channel(3, 2, make_rng(4), n_kraus=3)
        out = apply_channel(ch, random_density(3, 5))
        assert abs(np.trace(out) - 1) < 1e-9


class TestChoi:
    def test_identity(self):
        phi = (ket(0, 4) + ket(3, 4)) / np.sqrt(2)
        assert_allclose(choi_of(identity_channel(2)), 2 * projector(phi))

    def test_fully_depolarizing(self):
        assert_allclose(choi_of(constant_channel(np.eye(2) / 2, 2)), np.eye(4) / 2, atol=1e-14)

    def test_unitary_rank_one(self):
        assert np.linalg.matrix_rank(choi_of(unitary_channel(random_unitary(3, 0))), tol=1e-10) == 1

    def test_matches_map_construction(self):
        ch = random_channel(2, 3, make_rng(1))
        assert_allclose(choi_of(ch), choi_from_map(lambda r: apply_channel(ch, r), 2), atol=1e-14)

    def test_identity_roundtrip(self):
        ch = kraus_from_choi(choi_of(identity_channel(2)), 2, 2)
        assert len(ch) == 1
        k = ch.kraus[0]
        assert_allclose(k / k[0, 0] * abs(k[0, 0]), np.eye(2), atol=1e-12)

    def test_depolarizing_four_kraus(self):
        ch = kraus_from_choi(np.eye(4) / 2, 2, 2)
        assert len(ch) == 4
        paulis = Channel.from_kraus([PAULI[p] / 2 for p in "IXYZ"])
        assert_allclose(basis_action(ch), basis_action(paulis), atol=1e-12)

    def test_not_cp(self):
        with pytest.raises(ValueError):
            kraus_from_choi(np.diag([1.0, -0.5, 0.0, 1.5]), 2, 2)

    def test_not_tp(self):
        with pytest.raises(ValueError):
            kraus_from_choi(np.eye(4), 2, 2)

    @settings(max_examples=25, deadline=None)
    @given(seeds, st.integers(1, 3), st.integers(1, 3), st.integers(1, 4))
    def test_roundtrip_and_invariants(self, seed, d_in, d_out, n):
        n = max(n, -(-d_in // d_out))
        ch = random_channel(d_in, d_out, make_rng(seed), n_kraus=n)
        choi = choi_of(ch)
        assert np.linalg.eigvalsh(choi).min() >= -1e-9
        assert_allclose(partial_trace(choi, [d_in, d_out], [0]), np.eye(d_in), atol=1e-9)
        back = kraus_from_choi(choi, d_in, d_out)
        assert len(back) <= d_in * d_out
        assert_allclose(choi_of(back), choi, atol=1e-10)

    def test_compose(self):
        rng = make_rng(8)
        inner, outer = random_channel(2, 3, rng), random_channel(3, 2, rng)
        rho = random_density(2, 9)
        both = compose(outer, inner)
        assert_allclose(apply_channel(both, rho), apply_channel(outer, apply_channel(inner, rho)), atol=1e-12)


class TestSnc:
    def test_identity_encoding_gives_phi0(self):
        tau = random_product_state((2, 2, 2), make_rng(2))
        net = three_qubit(tau)
        inst = SncInstance(net, identity_encoding(2, 2), 0.4)
        assert_allclose(choi_of(snc_channel(inst)), choi_of(depolarizing_phi0(net, 0.4, 2)), atol=1e-8)

    def test_swap_no_hamiltonian(self):
        tau = random_product_state((2, 2, 2), make_rng(3), pure=False)
        net = three_qubit(tau).with_terms([])
        inst = SncInstance(net, swap_encoding(2, 2), 1.3)
        tau_b = partial_trace(tau, (2, 2, 2), [2])
        assert_allclose(choi_of(snc_channel(inst)), choi_of(constant_channel(tau_b, 2)), atol=1e-10)

    def test_swap_time_zero(self):
        tau = random_product_state((2, 2, 2), make_rng(4))
        net = three_qubit(tau)
        tau_b = partial_trace(tau, (2, 2, 2), [2])
        ch = snc_channel(SncInstance(net, swap_encoding(2, 2), 0.0))
        assert_allclose(choi_of(ch), choi_of(constant_channel(tau_b, 2)), atol=1e-10)

    def test_swap_channel_formula(self):
        # with swap encoding the channel is rho -> Tr_AC[U (rho_A (x) tau_BC) U^dag]
        tau = random_product_state((2, 2, 2), make_rng(5), pure=False)
        net = three_qubit(tau, onsite=0.3 * PAULI["X"])
        t = 0.7
        u = evolve_unitary(assemble_hamiltonian(net), t)
        tau_bc = partial_trace(tau, (2, 2, 2), [1, 2])
        ch = snc_channel(SncInstance(net, swap_encoding(2, 2), t))
        for seed in range(4):
            rho = random_density(2, seed)
            direct = partial_trace(u @ np.kron(rho, tau_bc) @ u.conj().T, (2, 2, 2), [2])
            assert_allclose(apply_channel(ch, rho), direct, atol=1e-10)

    def test_instance_dimension_check(self):
        with pytest.raises(ValueError):
            SncInstance(three_qubit(), identity_encoding(2, 4), 0.1)

    def test_factorization(self):
        tau = random_product_state((2, 2, 2), make_rng(6))
        net = three_qubit(tau)
        enc = Encoding(random_channel(4, 4, make_rng(7), n_kraus=3), 2)
        inst = SncInstance(net, enc, 0.5)
        e = encoding_channel(inst)
        assert_allclose(choi_of(snc_channel(inst)), choi_of(compose(psi_channel(net, 0.5), e)), atol=1e-8)
        assert_allclose(
            choi_of(depolarizing_phi1(net, 0.5, 2)),
            choi_of(compose(psi_dp1_channel(net, 0.5), e)),
            atol=1e-8,
        )


class TestComparators:
    def test_no_hamiltonian(self):
        tau = random_product_state((2, 2, 2), make_rng(1), pure=False)
        net = three_qubit(tau).with_terms([])
        tau_b = partial_trace(tau, (2, 2, 2), [2])
        assert_allclose(rho_b0(net, 2.0), tau_b, atol=1e-12)
        assert_allclose(rho_b1(net, 2.0), tau_b, atol=1e-12)

    def test_constant_output(self):
        net = three_qubit(random_density(8, 3))
        for phi in (depolarizing_phi0(net, 0.3, 2), depolarizing_phi1(net, 0.3, 2)):
            ref = apply_channel(phi, np.eye(2) / 2)
            for seed in range(20):
                assert_allclose(apply_channel(phi, random_density(2, seed)), ref, atol=1e-12)

    def test_product_state_equal(self):
        net = three_qubit(random_product_state((2, 2, 2), make_rng(9), pure=False))
        assert_allclose(rho_b1(net, 0.8), rho_b0(net, 0.8), atol=1e-10)

    def test_correlated_state_differs(self):
        net = three_qubit(random_density(8, 11, rank=1))
        assert np.abs(rho_b1(net, 0.8) - rho_b0(net, 0.8)).max() > 1e-3


class TestEncodings:
    def test_swap_squared(self):
        s = swap_operator(3, 3)
        assert_allclose(s @ s, np.eye(9))

    def test_swap_exchanges(self):
        r, s = random_density(2, 0), random_density(2, 1)
        out = apply_channel(swap_encoding(2, 2).channel, np.kron(r, s))
        assert_allclose(out, np.kron(s, r), atol=1e-14)

    def test_swap_needs_equal_dims(self):
        with pytest.raises(ValueError):
            swap_encoding(2, 4)

    def test_classical_single_map_constant(self):
        net = three_qubit(random_product_state((2, 2, 2), make_rng(0)))
        enc = classical_encoding_family([unitary_channel(random_unitary(2, 1))])
        ch = snc_channel(SncInstance(net, enc, 0.3))
        # a one-symbol alphabet leaves nothing to choose: the channel has a 1-dim input
        assert ch.input_dim == 1
        assert abs(np.trace(apply_channel(ch, np.ones((1, 1)))) - 1) < 1e-12

    def test_classical_identical_maps_constant(self):
        net = three_qubit(random_product_state((2, 2, 2), make_rng(0)))
        u = unitary_channel(random_unitary(2, 1))
        ch = snc_channel(SncInstance(net, classical_encoding_family([u, u]), 0.3))
        ref = apply_channel(ch, np.eye(2) / 2)
        for seed in range(5):
            assert_allclose(apply_channel(ch, random_density(2, seed)), ref, atol=1e-12)

    def test_classical_outputs_match_direct_evolution(self):
        net = chain_network(2, state=random_product_state((2, 2), make_rng(2)))
        us = [random_unitary(2, 3), random_unitary(2, 4)]
        ch = snc_channel(SncInstance(net, classical_encoding_family([unitary_channel(u) for u in us]), 0.6))
        big_u = evolve_unitary(assemble_hamiltonian(net), 0.6)
        for alpha, u in enumerate(us):
            local = np.kron(u, np.eye(2))
            state = big_u @ local @ net.initial_state @ local.conj().T @ big_u.conj().T
            expected = partial_trace(state, (2, 2), [1])
            assert_allclose(apply_channel(ch, projector(ket(alpha, 2))), expected, atol=1e-9)

    def test_classical_dimension_mismatch(self):
        with pytest.raises(ValueError):
            classical_encoding_family([identity_channel(2), identity_channel(3)])

    def test_reduced_identity(self):
        net = three_qubit()
        red = reduced_encoding(identity_encoding(2, 2), random_density(2, 0), net)
        rho = random_density(8, 1)
        assert_allclose(apply_channel(red, rho), rho, atol=1e-12)

    def test_reduced_swap_replaces_a(self):
        net = three_qubit()
        v = np.array([0.6, 0.8j])
        red = reduced_encoding(swap_encoding(2, 2), projector(v), net)
        rho = random_density(8, 2)
        expected = np.kron(projector(v), partial_trace(rho, (2, 2, 2), [1, 2]))
        assert_allclose(apply_channel(red, rho), expected, atol=1e-12)

    def test_local_kraus_count(self):
        enc = Encoding(random_channel(4, 4, make_rng(5), n_kraus=4), 2)
        assert len(local_encoding_map(enc, random_density(2, 6))) <= 4

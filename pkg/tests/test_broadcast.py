import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nobroadcast.broadcast import (
    BroadcastCandidate,
    basis_cloner,
    broadcast_quality,
    candidate_from_channel,
    clonable,
    commuting_broadcaster,
    controlled_shift,
    correlated_candidate,
    entangled_candidate,
    product_candidate,
    simultaneous_eigenbasis,
    verify_chain,
)
from nobroadcast.distinguish import fidelity
from nobroadcast.errors import InvalidConfig, NotCommuting, ShapeMismatch
from nobroadcast.linalg import dagger, partial_trace, tensor
from nobroadcast.states import (
    apply_channel,
    basis_state,
    bloch_qubit,
    dilation_channel,
    pure_state,
    random_density,
    random_unitary,
)

from conftest import random_commuting_pair

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestCloner:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_controlled_shift_is_permutation(self, n):
        s = controlled_shift(n)
        np.testing.assert_array_equal(s @ s.T, np.eye(n * n))
        for j in range(n):
            e = np.zeros(n * n)
            e[j * n] = 1
            expected = np.zeros(n * n)
            expected[j * n + j] = 1
            np.testing.assert_array_equal(s @ e, expected)

    def test_basis_cloner_copies(self, rng):
        v = random_unitary(3, rng)
        u = basis_cloner(v)
        blank = np.eye(3)[:, 0]
        for b in range(3):
            np.testing.assert_allclose(u @ np.kron(v[:, b], blank), np.kron(v[:, b], v[:, b]), atol=1e-13)
        assert np.linalg.norm(dagger(u) @ u - np.eye(9)) <= 1e-12

    def test_cnot_for_computational_basis(self):
        np.testing.assert_array_equal(basis_cloner(np.eye(2)), np.eye(4)[[0, 1, 3, 2]])


class TestEigenbasis:
    def test_diagonal(self):
        v = simultaneous_eigenbasis(np.diag([0.7, 0.3]), np.diag([0.2, 0.8]))
        assert np.allclose(np.abs(v), np.eye(2)[:, ::-1]) or np.allclose(np.abs(v), np.eye(2))

    def test_degenerate_first_state(self, rng):
        u = random_unitary(3, rng)
        a = u @ np.diag([0.5, 0.25, 0.25]) @ dagger(u)
        b = u @ np.diag([0.2, 0.3, 0.5]) @ dagger(u)
        v = simultaneous_eigenbasis(a, b)
        for rho in (a, b):
            d = dagger(v) @ rho @ v
            np.testing.assert_allclose(d, np.diag(np.diag(d)), atol=1e-10)

    def test_noncommuting_raises_with_norm(self):
        with pytest.raises(NotCommuting) as info:
            simultaneous_eigenbasis(np.asarray(bloch_qubit((0, 0, 0.8))), np.asarray(bloch_qubit((0.8, 0, 0))))
        assert info.value.commutator_norm == pytest.approx(0.32 * np.sqrt(2), abs=1e-12)


class TestCommutingBroadcaster:
    def test_example_pair(self):
        a, b = np.diag([0.7, 0.3]), np.diag([0.2, 0.8])
        ch = commuting_broadcaster(a, b)
        assert broadcast_quality(ch, a, b) == pytest.approx(1.0, abs=1e-12)
        out = np.asarray(apply_channel(ch, a))
        np.testing.assert_allclose(partial_trace(out, (2, 2), 0), a, atol=1e-14)
        np.testing.assert_allclose(partial_trace(out, (2, 2), 1), a, atol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(2, 4))
    def test_random_pairs(self, seed, n):
        a, b = random_commuting_pair(n, np.random.default_rng(seed))
        ch = commuting_broadcaster(a, b)
        rep = verify_chain(candidate_from_channel(ch, a, b))
        assert max(rep.marginal_errors) <= 1e-10
        assert rep.broadcasts
        assert broadcast_quality(ch, a, b) == pytest.approx(1.0, abs=1e-10)

    def test_rejects_noncommuting(self):
        with pytest.raises(NotCommuting):
            commuting_broadcaster(np.asarray(bloch_qubit((0, 0, 0.8))), np.asarray(bloch_qubit((0.8, 0, 0))))

    def test_does_not_clone_mixed_states(self):
        a, b = np.diag([0.7, 0.3]), np.diag([0.2, 0.8])
        out = np.asarray(apply_channel(commuting_broadcaster(a, b), a))
        assert np.linalg.norm(out - tensor(a, a)) > 0.1


class TestQuality:
    def test_identity_map_fails_to_broadcast(self):
        a, b = np.diag([0.7, 0.3]), np.diag([0.2, 0.8])
        q = broadcast_quality(dilation_channel(np.eye(4), 2), a, b)
        assert q < 1

    def test_mean_at_least_min(self, rng):
        a, b = random_density(2, seed=rng), random_density(2, seed=rng)
        ch = dilation_channel(random_unitary(8, rng), 2, 2, 2)
        assert broadcast_quality(ch, a, b, "mean_marginal_fidelity") >= broadcast_quality(ch, a, b) - 1e-15

    def test_unknown_objective(self, rng):
        a = random_density(2, seed=rng)
        with pytest.raises(InvalidConfig):
            broadcast_quality(dilation_channel(np.eye(4), 2), a, a, "max")

    def test_shape_check(self):
        with pytest.raises(ShapeMismatch):
            broadcast_quality(dilation_channel(np.eye(4), 2), np.eye(3) / 3, np.eye(3) / 3)


class TestClonable:
    def test_identical(self, rng):
        a = random_density(3, seed=rng)
        assert clonable(a, a)

    def test_orthogonal(self):
        assert clonable(basis_state(3, 0), basis_state(3, 2))

    def test_commuting_mixed_not_clonable(self):
        assert not clonable(np.diag([0.7, 0.3]), np.diag([0.2, 0.8]))

    def test_nonorthogonal_pure(self):
        assert not clonable(pure_state([1, 0]), pure_state([1, 1]))


class TestChain:
    def test_random_channels_respect_inequalities(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 4))
            dc = int(rng.integers(1, 3))
            ch = dilation_channel(random_unitary(n * n * dc, rng), n, n, dc)
            a, b = random_density(n, seed=rng), random_density(n, seed=rng)
            rep = verify_chain(candidate_from_channel(ch, a, b))
            assert rep.partial_trace_ok
            assert rep.channel_consistent
            assert not rep.notes

    def test_commuting_broadcaster_structure(self, rng):
        for n in (2, 3, 4):
            a, b = random_commuting_pair(n, rng)
            rep = verify_chain(candidate_from_channel(commuting_broadcaster(a, b), a, b))
            assert rep.equality_gap <= 1e-8
            s = rep.structural
            assert s is not None and s.passed
            for r in (s.g_error, s.h_error, s.g_residual, s.h_residual, s.nullity_residual):
                assert r <= 1e-7
            assert s.m_rho0_commutator <= 1e-8

    def test_cloning_candidate_inconsistent(self):
        a, b = np.asarray(bloch_qubit((0, 0, 0.8))), np.asarray(bloch_qubit((0.8, 0, 0)))
        rep = verify_chain(product_candidate(a, b))
        assert rep.broadcasts
        assert not rep.channel_consistent
        assert rep.f_joint == pytest.approx(rep.f_in ** 2, abs=1e-9)
        assert rep.structural is None and rep.structural_skipped
        assert rep.notes

    def test_correlated_candidate_equals_broadcaster(self, rng):
        a, b = random_commuting_pair(3, rng)
        cand = correlated_candidate(a, b)
        from_channel = candidate_from_channel(commuting_broadcaster(a, b), a, b)
        np.testing.assert_allclose(cand.tilde0, from_channel.tilde0, atol=1e-12)
        np.testing.assert_allclose(cand.tilde1, from_channel.tilde1, atol=1e-12)

    def test_entangled_candidate_marginals(self, rng):
        a, b = random_commuting_pair(2, rng)
        cand = entangled_candidate(a, b)
        rep = verify_chain(cand)
        assert rep.broadcasts
        # pure joint states with Bhattacharyya overlap: equality throughout
        assert rep.equality_gap <= 1e-8

    def test_candidate_validation(self):
        with pytest.raises(ShapeMismatch):
            BroadcastCandidate(np.eye(2) / 2, np.eye(2) / 2, np.eye(3) / 3, np.eye(4) / 4)

    def test_report_dict(self, rng):
        a, b = random_commuting_pair(2, rng)
        d = verify_chain(candidate_from_channel(commuting_broadcaster(a, b), a, b)).to_dict()
        assert d["broadcasts"] and d["structural"]["passed"]
        assert len(d["marginal_errors"]) == 4

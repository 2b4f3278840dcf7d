import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlgames.errors import DimensionMismatch, InputError, InvariantError
from nlgames.quantumlab import (
    MultiRegisterState,
    RobustTripleSpec,
    SubMeasurement,
    basis_measurement,
    canned_strategies,
    cauchy_schwarz_slack,
    closeness_from_consistency,
    consistency_metrics,
    epr,
    ghz,
    intersection_max,
    mixing_curve,
    pairwise_form,
    placement_spread,
    random_projective,
    random_unitary,
    robust_triple_metrics,
    rotated_measurement,
    schmidt_diagonal_state,
    self_consistency,
    state_norm,
    symmetric_state,
    trace_rho,
)

seeds = st.integers(0, 2**32 - 1)


def kron_form(ops, state):
    """<Ψ| op_0 ⊗ op_1 ⊗ ... |Ψ> by building the full Kronecker product."""
    eye = np.eye(state.dim)
    full = np.array([[1.0]])
    for i in range(state.r):
        full = np.kron(full, ops.get(i, eye))
    return complex(np.vdot(state.vector, full @ state.vector))


class TestStates:
    def test_norm_checked(self):
        with pytest.raises(InvariantError):
            MultiRegisterState(2, 2, [1, 1, 0, 0])
        with pytest.raises(DimensionMismatch):
            MultiRegisterState(2, 2, [1, 0, 0])

    @settings(max_examples=20)
    @given(st.integers(2, 3), st.integers(2, 3), seeds)
    def test_symmetric_state_invariant(self, r, d, seed):
        s = symmetric_state(r, d, np.random.default_rng(seed))
        assert s.swap_residual() <= 1e-12

    def test_reduced_density(self):
        rho = epr().reduced_density([0])
        assert np.allclose(rho, np.eye(2) / 2)
        rho = ghz(3).reduced_density([0, 1])
        assert abs(np.trace(rho) - 1) < 1e-12

    def test_expectation_matches_kron(self):
        rng = np.random.default_rng(0)
        s = symmetric_state(3, 2, rng)
        ops = {0: random_unitary(2, rng), 2: random_unitary(2, rng)}
        assert abs(s.expectation(ops) - kron_form(ops, s)) < 1e-12

    def test_schmidt_weights(self):
        s = schmidt_diagonal_state(2, [1, 3])
        assert np.allclose(np.diag(s.reduced_density([0])).real, [0.25, 0.75])


class TestSubMeasurement:
    def test_overcomplete_rejected(self):
        with pytest.raises(InvariantError):
            SubMeasurement({0: np.eye(2), 1: np.eye(2) * 0.5})

    def test_non_psd_rejected(self):
        with pytest.raises(InvariantError):
            SubMeasurement({0: np.diag([1.0, -0.1])})

    def test_projective_flag(self):
        with pytest.raises(InvariantError):
            SubMeasurement({0: np.eye(2) / 2, 1: np.eye(2) / 2}, projective=True)

    def test_missing_key_is_zero(self):
        m = basis_measurement(2)
        assert not m[7].any()

    @given(st.integers(2, 5), seeds)
    def test_random_projective_complete(self, d, seed):
        m = random_projective(d, ["x", "y", "z"], np.random.default_rng(seed))
        assert m.is_complete()
        r = rotated_measurement(m, 0.3, np.random.default_rng(seed + 1))
        assert r.is_complete()

    def test_scaled(self):
        m = basis_measurement(3).scaled(0.5)
        assert np.allclose(m.total(), np.eye(3) / 2)
        assert not m.is_complete()


class TestForms:
    @settings(max_examples=20)
    @given(st.integers(2, 3), seeds)
    def test_placement_invariant_on_symmetric_states(self, d, seed):
        rng = np.random.default_rng(seed)
        s = symmetric_state(3, d, rng)
        A = random_projective(d, [0, 1], rng)[0]
        B = random_projective(d, [0, 1], rng)[1]
        assert placement_spread(A, B, s) <= 1e-12

    @settings(max_examples=20)
    @given(seeds)
    def test_cauchy_schwarz(self, seed):
        rng = np.random.default_rng(seed)
        s = symmetric_state(2, 3, rng)
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert cauchy_schwarz_slack(A, B, s) >= -1e-9

    def test_trace_and_norm(self):
        s = epr()
        assert abs(trace_rho(np.eye(2), s) - 1) < 1e-12
        assert state_norm(np.eye(2), s) == pytest.approx((1.0, 1.0))

    def test_pairwise_needs_distinct_registers(self):
        with pytest.raises(InputError):
            pairwise_form(np.eye(2), np.eye(2), epr(), (0, 0))


class TestConsistency:
    def test_perfect_agreement(self):
        s = schmidt_diagonal_state(3, [1, 1, 1])
        A = {v: basis_measurement(3) for v in range(3)}
        M = SubMeasurement({(a, a, a): A[0][a] for a in range(3)})
        rep = consistency_metrics(M, A, s)
        assert max(abs(rep.delta), abs(rep.gamma), abs(rep.eta)) <= 1e-12
        assert abs(self_consistency(A, s)) <= 1e-12

    def test_matches_kron_oracle(self):
        rng = np.random.default_rng(4)
        s = symmetric_state(2, 3, rng)
        A = {v: random_projective(3, [0, 1], rng) for v in range(2)}
        M = SubMeasurement({g: A[0][g[0]] / 2 for g in itertools.product((0, 1), repeat=2)})
        rep = consistency_metrics(M, A, s)
        delta = 0.0
        for v in range(2):
            for g, Mg in M.elements.items():
                for a, Aa in A[v].elements.items():
                    if a != g[v]:
                        delta += 0.5 * kron_form({0: Mg, 1: Aa}, s).real
        tot = M.total()
        gamma = kron_form({0: tot, 1: np.eye(3) - tot}, s).real
        eta = 1 - kron_form({0: tot}, s).real
        assert rep.delta == pytest.approx(delta, abs=1e-12)
        assert rep.gamma == pytest.approx(gamma, abs=1e-12)
        assert rep.eta == pytest.approx(eta, abs=1e-12)

    @settings(max_examples=30)
    @given(st.integers(2, 3), st.floats(0, 1.0), seeds)
    def test_closeness_derived_bound(self, d, angle, seed):
        rng = np.random.default_rng(seed)
        s = symmetric_state(3, d, rng)
        A = random_projective(d, list(range(d)), rng)
        rep = closeness_from_consistency(A, rotated_measurement(A, angle, rng), s)
        assert rep.derived_holds
        assert rep.lhs >= -1e-12

    def test_closeness_needs_three_registers(self):
        with pytest.raises(InputError):
            closeness_from_consistency(basis_measurement(2), basis_measurement(2), epr())


class TestRobustTriples:
    def spec(self, d=2):
        A = {v: basis_measurement(d) for v in range(3)}
        fns = [{0: 0, 1: 0, 2: 0}, {0: 1, 1: 1, 2: 1}, {0: 0, 1: 1, 2: 1}]
        return RobustTripleSpec.complete_graph(range(3), A, fns)

    def test_metrics_on_diagonal_state(self):
        s = schmidt_diagonal_state(3, [1, 1])
        R = SubMeasurement({0: np.diag([1.0, 0]), 1: np.diag([0, 1.0])})
        rep = robust_triple_metrics(self.spec(), s, R, steps=5)
        assert abs(rep.self_consistency) <= 1e-12
        assert rep.max_intersection == pytest.approx(2 / 3)
        assert rep.stability >= -1e-12
        assert rep.as_dict()["mixing"] == pytest.approx(mixing_curve(self.spec(), 5))

    def test_mixing_complete_graph(self):
        curve = mixing_curve(self.spec(), 6)
        assert curve[0] == pytest.approx(2 / 3)
        assert all(b <= a + 1e-12 for a, b in zip(curve, curve[1:]))

    def test_intersection(self):
        assert intersection_max([{0: 1, 1: 2}, {0: 1, 1: 3}], [0, 1]) == 0.5

    def test_incomplete_measurement_rejected(self):
        A = {v: basis_measurement(2).scaled(0.5) for v in range(2)}
        with pytest.raises(InvariantError):
            RobustTripleSpec.complete_graph(range(2), A, [{0: 0, 1: 0}])


class TestCanned:
    def test_contents(self):
        c = canned_strategies()
        assert set(c) >= {"chsh", "ghz3", "epr"}
        assert math.isclose(np.linalg.norm(c["ghz3"].vector), 1)

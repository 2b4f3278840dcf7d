import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlgames.errors import DimensionMismatch, InputError, InvalidGame, InvariantError, TooLarge, Unsolved
from nlgames.gamecore import (
    TableGame,
    chsh_game,
    classical_value_bruteforce,
    evaluate_quantum,
    parity_game,
)
from nlgames.optim import (
    CLAIM_CONSTANT,
    SdpProblem,
    bar,
    classical_xor_bias,
    consolidation_audit,
    consolidation_sdp,
    embed,
    primal_objective,
    psd_sqrt,
    renormalized_state,
    seesaw_lower_bound,
    solve_sdp,
    unembed,
    xor_bias_sdp_2player,
)
from nlgames.quantumlab import classical_embedding, random_projective, symmetric_state

TSIRELSON = 0.5 + math.sqrt(2) / 4


def random_xor_game(rng, nq=2):
    qs = list(itertools.product(range(nq), repeat=2))
    w = rng.integers(1, 6, size=len(qs))
    target = {q: int(rng.integers(0, 2)) for q in qs}
    dist = [(q, Fraction(int(x), int(w.sum()))) for q, x in zip(qs, w)]
    return TableGame(2, dist, answers=(0, 1), predicate=lambda q, a: (a[0] ^ a[1]) == target[q], xor=True)


def random_density(d, rng, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


class TestSdpCore:
    def test_scalar_bound(self):
        # maximise t subject to t <= 1
        sol = solve_sdp(SdpProblem([1], [(0, np.eye(1))], [([(0, np.eye(1))], "<=", 1.0)]))
        assert sol.primal_value == pytest.approx(1, abs=1e-7)
        assert sol.gap <= 1e-7

    def test_top_eigenvalue(self):
        C = np.diag([2.0, -1.0])
        sol = solve_sdp(SdpProblem([2], [(0, C)], [([(0, np.eye(2))], "==", 1.0)]))
        assert sol.primal_value == pytest.approx(2, abs=1e-7)
        assert sol.dual_value == pytest.approx(2, abs=1e-7)

    def test_infeasible(self):
        with pytest.raises(Unsolved):
            solve_sdp(SdpProblem([1], [(0, np.eye(1))], [([(0, np.eye(1))], "<=", -1.0)]))

    def test_lmi_constraint(self):
        # max Tr(C X) with X <= Id is the sum of positive eigenvalues
        C = np.diag([3.0, 1.0, -2.0])
        sol = solve_sdp(SdpProblem([3], [(0, C)], lmis=[([(0, 1.0)], "<=", np.eye(3))]))
        assert sol.primal_value == pytest.approx(4, abs=1e-6)

    @settings(max_examples=15)
    @given(st.integers(2, 4), st.integers(0, 2**32 - 1))
    def test_weak_duality_and_eigen_oracle(self, n, seed):
        rng = np.random.default_rng(seed)
        C = rng.normal(size=(n, n))
        C = (C + C.T) / 2
        sol = solve_sdp(SdpProblem([n], [(0, C)], [([(0, np.eye(n))], "==", 1.0)]))
        assert sol.dual_value >= sol.primal_value - 1e-7
        assert sol.primal_value == pytest.approx(np.linalg.eigvalsh(C).max(), abs=1e-6)

    def test_validation(self):
        with pytest.raises(TooLarge):
            SdpProblem([150, 60], [(0, np.eye(150))])
        with pytest.raises(InputError):
            SdpProblem([2], [(0, np.array([[0, 1], [0, 0]]))])
        with pytest.raises(DimensionMismatch):
            SdpProblem([2], [(0, np.eye(3))])
        with pytest.raises(InputError):
            SdpProblem([1], [(0, np.eye(1))], [([(0, np.eye(1))], "<", 1.0)])

    def test_dump_is_plain(self):
        p = SdpProblem([1], [(0, np.eye(1))], [([(0, np.eye(1))], "<=", 1.0)])
        d = p.dump()
        assert d["blocks"] == [1] and d["scalar"][0][1] == "<="

    def test_embedding(self):
        rng = np.random.default_rng(0)
        H = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        H = H + H.conj().T
        assert np.allclose(unembed(embed(H)), H)
        assert np.allclose(np.sort(np.linalg.eigvalsh(embed(H))), np.sort(np.repeat(np.linalg.eigvalsh(H), 2)))
        rho = random_density(3, rng)
        assert np.allclose(psd_sqrt(rho) @ psd_sqrt(rho), rho)


class TestConsolidation:
    def test_single_identity(self):
        rho = random_density(3, np.random.default_rng(1))
        res = consolidation_sdp(rho, {0: np.eye(3)})
        assert res.omega == pytest.approx(1, abs=1e-7)

    def test_commuting_diagonal(self):
        rng = np.random.default_rng(2)
        p = rng.random(4)
        rho = np.diag(p / p.sum())
        Abar = {g: np.diag(rng.random(4)) for g in range(3)}
        oracle = sum(rho[i, i] * max(Abar[g][i, i] for g in Abar) for i in range(4))
        res = consolidation_sdp(rho, Abar)
        assert res.omega == pytest.approx(oracle, abs=1e-6)
        assert res.dual_value == pytest.approx(oracle, abs=1e-6)

    def test_singular_rho(self):
        rng = np.random.default_rng(3)
        rho = random_density(4, rng, rank=2)
        Abar = {g: random_projective(4, [0, 1], rng)[0] for g in range(2)}
        res = consolidation_sdp(rho, Abar)
        assert res.diagnostics["support_dim"] == 2
        total = sum(res.T.values())
        assert np.linalg.eigvalsh(total).max() <= 1 + 1e-6
        assert primal_objective(res.T, rho, Abar) == pytest.approx(res.omega, abs=1e-6)

    def test_bar_is_conjugation_in_eigenbasis(self):
        rng = np.random.default_rng(4)
        rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert np.allclose(bar(A, rho), np.conj(A))

    def test_audit_random(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            d = int(rng.integers(2, 5))
            state = symmetric_state(3, d, rng)
            A = {v: random_projective(d, [0, 1, 2], rng) for v in range(3)}
            G = {g: {v: int(rng.integers(0, 3)) for v in range(3)} for g in range(3)}
            audit = consolidation_audit(state, A, G)
            assert audit.passes
            assert audit.gap <= 1e-6 and audit.slackness <= 1e-5
            assert audit.as_dict()["constant"] == CLAIM_CONSTANT

    def test_rejects_non_density(self):
        with pytest.raises(InvariantError):
            consolidation_sdp(np.eye(2), {0: np.eye(2)})


class TestXor:
    def test_chsh(self):
        res = xor_bias_sdp_2player(chsh_game())
        assert res.bias == pytest.approx(math.sqrt(2) / 2, abs=1e-6)
        assert res.value == pytest.approx(TSIRELSON, abs=1e-6)
        assert classical_xor_bias(chsh_game()) == pytest.approx(0.5)

    def test_constant_game(self):
        dist = [((0, 0), Fraction(1))]
        g = TableGame(2, dist, answers=(0, 1), predicate=lambda q, a: True, xor=True)
        assert xor_bias_sdp_2player(g).bias == pytest.approx(1, abs=1e-6)

    def test_random_games_bracket(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            g = random_xor_game(rng, nq=int(rng.integers(2, 4)))
            q = xor_bias_sdp_2player(g).bias
            c = classical_xor_bias(g)
            assert q >= c - 1e-6
            assert q <= 1.7823 * abs(c) + 1e-6 or c <= 0
            assert (1 + c) / 2 == pytest.approx(float(classical_value_bruteforce(g)), abs=1e-9)

    def test_non_xor_rejected(self):
        g = TableGame(2, [((0, 0), 1)], answers=(0, 1), predicate=lambda q, a: a == (0, 0), xor=True)
        with pytest.raises(InvalidGame):
            xor_bias_sdp_2player(g)
        with pytest.raises(InvalidGame):
            xor_bias_sdp_2player(parity_game(3))


class TestSeesaw:
    def test_chsh_reaches_tsirelson(self):
        res = seesaw_lower_bound(chsh_game(), (2, 2), restarts=3, iters=40, seed=1)
        assert res.value <= TSIRELSON + 1e-9
        assert res.value >= TSIRELSON - 1e-4
        assert evaluate_quantum(chsh_game(), res.strategy) == pytest.approx(res.value, abs=1e-9)

    def test_from_classical_init(self):
        f = {0: 0, 1: 0}
        init = classical_embedding([f, f], [0, 1], [0, 1])
        # lift the 1-dim embedding into qubits
        from nlgames.gamecore import QuantumStrategy

        povm = {q: {a: np.kron(init.povms[0][q][a], np.eye(2)) for a in (0, 1)} for q in (0, 1)}
        psi = np.zeros(4)
        psi[0] = 1
        start = QuantumStrategy((2, 2), psi, [povm, povm])
        res = seesaw_lower_bound(chsh_game(), (2, 2), restarts=0, iters=20, init=start)
        assert res.value >= 0.75 - 1e-9

    def test_monotone_history(self):
        res = seesaw_lower_bound(chsh_game(), (2, 2), restarts=1, iters=15, seed=3)
        hist = res.history
        assert all(b >= a - 1e-7 for a, b in zip(hist, hist[1:]))
        assert res.value == max(res.restarts)

    def test_dimension_cap(self):
        with pytest.raises(TooLarge):
            seesaw_lower_bound(chsh_game(), (17, 17), restarts=1, iters=1)


class TestRenormalized:
    @settings(max_examples=20)
    @given(st.integers(2, 3), st.integers(0, 2**32 - 1))
    def test_bounds(self, d, seed):
        rng = np.random.default_rng(seed)
        state = symmetric_state(3, d, rng)
        R = random_projective(d, [0, 1], rng)[0] * rng.uniform(0, 0.3)
        out = renormalized_state(state, R)
        assert out.holds
        assert abs(np.linalg.norm(out.state.vector) - 1) < 1e-12

    def test_rejects_bad_R(self):
        state = symmetric_state(2, 2, np.random.default_rng(0))
        with pytest.raises(InvariantError):
            renormalized_state(state, 2 * np.eye(2))
        with pytest.raises(DimensionMismatch):
            renormalized_state(state, np.eye(3))

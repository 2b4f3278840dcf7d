import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlgames.errors import InputError, InvalidGame, InvariantError, TooLarge
from nlgames.gamecore import (
    DeterministicStrategy,
    QuantumStrategy,
    Round,
    TableGame,
    chsh_game,
    classical_value_bruteforce,
    compile_rounds,
    constant_game,
    evaluate_deterministic,
    evaluate_quantum,
    is_permutation_invariant,
    monte_carlo_value,
    parity_game,
    replay_round,
    symmetrize,
    xor_bias,
)
from nlgames.quantumlab import chsh_strategy, classical_embedding, ghz


def naive_classical_value(game):
    """Every deterministic strategy, no best-response shortcut."""
    alphabet = list(game.answer_alphabet)
    qsets = [sorted({rnd.questions[i] for rnd, _ in game.rounds()}, key=repr) for i in range(game.r)]
    best = Fraction(0)
    tables = [list(itertools.product(alphabet, repeat=len(q))) for q in qsets]
    for choice in itertools.product(*tables):
        strat = DeterministicStrategy([dict(zip(qsets[i], choice[i])) for i in range(game.r)])
        best = max(best, evaluate_deterministic(game, strat))
    return best


def random_table_game(rng, r=2, nq=2, na=2):
    qs = list(itertools.product(range(nq), repeat=r))
    weights = rng.integers(1, 5, size=len(qs))
    dist = [(q, Fraction(int(w), int(weights.sum()))) for q, w in zip(qs, weights)]
    accept = [(q, a) for q in qs for a in itertools.product(range(na), repeat=r) if rng.random() < 0.4]
    return TableGame(r, dist, answers=range(na), accept=accept)


class TestTableGame:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(InvalidGame):
            TableGame(2, [((0, 0), Fraction(1, 2))], answers=(0, 1), predicate=lambda q, a: True)

    def test_exactly_one_verifier(self):
        with pytest.raises(InvalidGame):
            TableGame(2, [((0, 0), 1)], answers=(0, 1))

    def test_one_player_rejected(self):
        with pytest.raises(InvalidGame):
            TableGame(1, [((0,), 1)], answers=(0, 1), predicate=lambda q, a: True)

    def test_asymmetric_game_flagged(self):
        with pytest.raises(InvalidGame):
            TableGame(2, [((0, 1), 1)], answers=(0, 1), predicate=lambda q, a: a[0] == 0, symmetric=True)

    def test_duplicate_rounds_merged(self):
        g = TableGame(2, [((0, 0), Fraction(1, 2)), ((0, 0), Fraction(1, 2))], answers=(0, 1), predicate=lambda q, a: True)
        assert len(g.rounds()) == 1

    def test_sampling_frequencies(self):
        g = TableGame(2, [((0, 0), Fraction(1, 3)), ((1, 1), Fraction(2, 3))], answers=(0, 1), predicate=lambda q, a: True)
        rng = np.random.default_rng(0)
        hits = sum(g.sample(rng).questions == (1, 1) for _ in range(6000))
        assert abs(hits / 6000 - 2 / 3) < 0.03

    def test_unqueried_players(self):
        rnd = Round((None, 3, None))
        assert rnd.queried == [1]

    def test_compile_rounds_preserves_value(self):
        g = chsh_game()
        assert classical_value_bruteforce(compile_rounds(g)) == Fraction(3, 4)


class TestClassicalValue:
    def test_chsh(self):
        assert classical_value_bruteforce(chsh_game()) == Fraction(3, 4)

    def test_constant_games(self):
        assert classical_value_bruteforce(constant_game(3, True)) == 1
        assert classical_value_bruteforce(constant_game(3, False)) == 0

    def test_parity(self):
        assert classical_value_bruteforce(parity_game(3)) == 1

    def test_cap(self):
        with pytest.raises(TooLarge):
            classical_value_bruteforce(random_table_game(np.random.default_rng(0), nq=3, na=3), cap=10)

    @settings(max_examples=25)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3)]))
    def test_matches_naive(self, seed, shape):
        r, nq, na = shape
        g = random_table_game(np.random.default_rng(seed), r, nq, na)
        assert classical_value_bruteforce(g) == naive_classical_value(g)

    def test_identical_restriction_is_lower(self):
        g = random_table_game(np.random.default_rng(3))
        assert classical_value_bruteforce(g, identical=True) <= classical_value_bruteforce(g)


class TestQuantum:
    def test_chsh_tsirelson(self):
        assert abs(evaluate_quantum(chsh_game(), chsh_strategy()) - (0.5 + np.sqrt(2) / 4)) < 1e-12

    def test_ghz_parity(self):
        state = ghz(3)
        x = {0: np.full((2, 2), 0.5), 1: np.array([[0.5, -0.5], [-0.5, 0.5]])}
        qs = QuantumStrategy((2, 2, 2), state.vector, [{0: x}] * 3)
        assert abs(evaluate_quantum(parity_game(3, target=0), qs) - 1) < 1e-12

    def test_invalid_povm(self):
        with pytest.raises(InvariantError):
            QuantumStrategy((2, 2), np.array([1, 0, 0, 0]), [{0: {0: np.eye(2), 1: np.eye(2)}}] * 2)

    def test_unnormalised_state(self):
        with pytest.raises(InvariantError):
            QuantumStrategy((2, 2), np.array([1, 1, 0, 0]), [{0: {0: np.eye(2)}}] * 2)

    def test_classical_embedding_value(self):
        f = {0: 0, 1: 0}
        qs = classical_embedding([f, f], [0, 1], [0, 1])
        det = DeterministicStrategy([f, f])
        assert abs(evaluate_quantum(chsh_game(), qs) - float(evaluate_deterministic(chsh_game(), det))) < 1e-12

    def test_joint_distribution_normalised(self):
        labels, probs = chsh_strategy().joint_distribution((0, 1))
        assert abs(probs.sum() - 1) < 1e-12

    def test_xor_bias(self):
        assert xor_bias(0.75) == 0.5
        with pytest.raises(InputError):
            xor_bias(1.5)


class TestMonteCarlo:
    def test_jobs_invariant(self):
        g, s = chsh_game(), chsh_strategy()
        a = monte_carlo_value(g, s, 3000, seed=5, jobs=1, chunk=500)
        b = monte_carlo_value(g, s, 3000, seed=5, jobs=2, chunk=500)
        assert a.as_dict() == b.as_dict()

    def test_estimate_within_hoeffding(self):
        res = monte_carlo_value(chsh_game(), chsh_strategy(), 20000, seed=1)
        assert abs(res.estimate - evaluate_quantum(chsh_game(), chsh_strategy())) <= res.half_width

    def test_replay_matches_rejection(self):
        g = chsh_game()
        s = DeterministicStrategy([{0: 0, 1: 0}, {0: 0, 1: 0}])
        res = monte_carlo_value(g, s, 400, seed=2, chunk=100, keep_rejections=5)
        assert res.rejections
        for t in res.rejections:
            again = replay_round(g, s, 2, t.chunk, t.index)
            assert again.questions == t.questions and not again.accept

    def test_rounds_positive(self):
        with pytest.raises(InputError):
            monte_carlo_value(chsh_game(), chsh_strategy(), 0)


class TestSymmetrize:
    def test_chsh_symmetrised(self):
        g = chsh_game()
        g.symmetric = True
        sym = symmetrize(g, chsh_strategy())
        assert abs(evaluate_quantum(g, sym) - evaluate_quantum(g, chsh_strategy())) < 1e-12
        assert is_permutation_invariant(sym.state, 2)
        for a in (0, 1):
            assert np.array_equal(sym.povms[0][0][a], sym.povms[1][0][a])

    def test_needs_symmetric_game(self):
        g = random_table_game(np.random.default_rng(1))
        with pytest.raises(InvalidGame):
            symmetrize(g, chsh_strategy())

    def test_three_players(self):
        g = parity_game(3, target=0)
        g.symmetric = True
        x = {0: np.full((2, 2), 0.5), 1: np.array([[0.5, -0.5], [-0.5, 0.5]])}
        qs = QuantumStrategy((2, 2, 2), ghz(3).vector, [{0: x}] * 3)
        sym = symmetrize(g, qs)
        assert is_permutation_invariant(sym.state, 3)
        assert abs(evaluate_quantum(g, sym) - 1) < 1e-12

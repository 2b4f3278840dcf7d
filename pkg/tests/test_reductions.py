import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlgames.errors import InputError, InvalidGame, TooLarge
from nlgames.gamecore import (
    DeterministicStrategy,
    TableGame,
    chsh_game,
    evaluate_deterministic,
    monte_carlo_value,
)
from nlgames.protocols import CNF, planted_3sat
from nlgames.reductions import (
    STAGES,
    AssignmentAnswers,
    ClauseVariableGame,
    CoordinatewiseStrategy,
    FourierDecoder,
    LiftedStrategy,
    LongCodeStrategy,
    PipelineManifest,
    ReductionConfig,
    anf,
    binarize_game,
    build_game_Gphi,
    build_stage,
    choose_modulus,
    dictator,
    fold,
    fourier_transform,
    honest_strategy,
    negate_index,
    oracularize,
    oracularized_classical_value,
    predicate_to_quadeq,
    repeat_with_confuse,
    satisfying_pairs,
    walsh_hadamard,
    xor_gadget,
)
from nlgames.field import is_prime
from nlgames.reductions.xorgadget import pack, representative, table_bit, unpack


def tiny_symmetric_game():
    """Two players, one bit question each; win iff answers are equal."""
    dist = [((x, y), Fraction(1, 4)) for x in (0, 1) for y in (0, 1)]
    return TableGame(2, dist, answers=(0, 1), predicate=lambda q, a: a[0] == a[1], symmetric=True)


def planted(n=5, m=6, seed=0):
    return planted_3sat(n, m, np.random.default_rng(seed))


class TestArithmetization:
    @given(st.lists(st.integers(0, 1), min_size=16, max_size=16))
    def test_anf_inverts(self, bits):
        truth = np.array(bits, dtype=np.uint8)
        assert np.array_equal(anf(anf(truth)), truth)

    @settings(max_examples=40)
    @given(st.integers(1, 2), st.data())
    def test_equivalence(self, m, data):
        size = 1 << m
        accept = data.draw(st.sets(st.tuples(st.integers(0, size - 1), st.integers(0, size - 1))))
        arith = predicate_to_quadeq(accept, m)
        assert satisfying_pairs(arith) == accept

    def test_witness_satisfies(self):
        accept = {(a, b) for a in range(8) for b in range(8) if (a * b + a) % 3 == 1}
        arith = predicate_to_quadeq(accept, 3)
        for a, b in accept:
            assert arith.instance.satisfied_by(arith.witness(a, b))
        for a, b in itertools.product(range(8), repeat=2):
            if (a, b) not in accept:
                assert not arith.instance.satisfied_by(arith.witness(a, b))

    def test_gate_sharing(self):
        # a three-variable monomial and its four-variable extension share a prefix gate
        def pred(a1, a2):
            x = a1 | (a2 << 2)
            bits = [(x >> i) & 1 for i in range(4)]
            return (bits[0] & bits[1] & bits[2]) ^ (bits[0] & bits[1] & bits[2] & bits[3])

        arith = predicate_to_quadeq(pred, 2)
        assert len(arith.gates) == 3  # x0x1, x0x1x2, x0x1x2x3

    def test_needs_bits(self):
        with pytest.raises(InputError):
            predicate_to_quadeq(set(), 0)


class TestSourceGame:
    def test_honest_value(self):
        cnf, asg = planted()
        game = ClauseVariableGame(cnf)
        strat = DeterministicStrategy([AssignmentAnswers(cnf, asg)] * 3)
        assert evaluate_deterministic(game, strat) == 1

    def test_unsatisfiable_below_one(self):
        clauses = tuple(tuple(s * v for s, v in zip(signs, (1, 2, 3))) for signs in itertools.product((1, -1), repeat=3))
        cnf = CNF(3, clauses)
        game = ClauseVariableGame(cnf)
        for bits in itertools.product((0, 1), repeat=3):
            strat = DeterministicStrategy([AssignmentAnswers(cnf, bits)] * 3)
            assert evaluate_deterministic(game, strat) < 1

    def test_repeated_variable_consistency(self):
        cnf = CNF(2, ((1, 1, 2),))
        game = ClauseVariableGame(cnf)
        assert not game.predicate(("clause", 0), ("var", 2), 0b110, 1)
        assert game.predicate(("clause", 0), ("var", 2), 0b111, 1)


class TestGphi:
    def test_modulus_in_interval(self):
        ch = choose_modulus(64, 0.5, 2)
        assert is_prime(ch.q) and ch.low <= ch.q <= ch.high

    def test_report(self):
        cnf, _ = planted(8, 10)
        h = build_game_Gphi(cnf, ReductionConfig(modulus=97))
        rep = h.report()
        assert rep["field"]["q"] == 97
        assert rep["question_bits"] > 0 and rep["answer_bits"] > 0

    def test_non_prime_override(self):
        cnf, _ = planted(8, 10)
        with pytest.raises(InputError):
            build_game_Gphi(cnf, ReductionConfig(modulus=96))

    def test_config_validation(self):
        with pytest.raises(InputError):
            ReductionConfig(K=0)
        with pytest.raises(InputError):
            ReductionConfig(eps_xor=0.5)
        assert ReductionConfig(K2=0).K2 == 0


class TestBinarized:
    def test_honest_completeness(self):
        cnf, asg = planted()
        game = binarize_game(ClauseVariableGame(cnf))
        res = monte_carlo_value(game, LiftedStrategy(game, AssignmentAnswers(cnf, asg)), 1500, seed=3)
        assert res.accepted == res.rounds

    def test_bad_source_answer_rejected(self):
        cnf, asg = planted()
        game = binarize_game(ClauseVariableGame(cnf))
        bad = list(asg)
        bad[0] ^= 1
        res = monte_carlo_value(game, LiftedStrategy(game, AssignmentAnswers(cnf, bad)), 3000, seed=4)
        # clause answers are recomputed from the flipped assignment, so only violated clauses reject
        assert res.accepted <= res.rounds

    def test_needs_symmetric_source(self):
        with pytest.raises(InvalidGame):
            binarize_game(chsh_game())


class TestOracularize:
    def test_distribution(self):
        g = oracularize(tiny_symmetric_game())
        assert sum(w for _, w in g.rounds()) == 1

    def test_honest_strategy_wins(self):
        g = oracularize(tiny_symmetric_game())
        assert evaluate_deterministic(g, CoordinatewiseStrategy(lambda q: 0)) == 1

    def test_exact_value(self):
        src = tiny_symmetric_game()
        assert oracularized_classical_value(src) == 1

    def test_value_bounded_by_source(self):
        dist = [((x, y), Fraction(1, 4)) for x in (0, 1) for y in (0, 1)]
        src = TableGame(2, dist, answers=(0, 1), predicate=lambda q, a: (a[0] ^ a[1]) == (q[0] ^ q[1]) and q != (1, 1), symmetric=True)
        v = oracularized_classical_value(src)
        assert v <= 1
        assert v >= evaluate_deterministic(oracularize(src), CoordinatewiseStrategy(lambda q: q))

    def test_malformed_triple_rejected(self):
        g = oracularize(tiny_symmetric_game())
        rnd, _ = g.rounds()[0]
        i, j = g.roles(rnd)
        answers = [None, None]
        answers[i], answers[j] = (0,), 0
        assert not g.check(rnd, tuple(answers))


class TestRepetition:
    def test_distribution_and_honest(self):
        g = repeat_with_confuse(oracularize(tiny_symmetric_game()), 1, 1)
        assert sum(w for _, w in g.rounds()) == 1
        assert evaluate_deterministic(g, CoordinatewiseStrategy(lambda q: 1)) == 1

    def test_without_confuse(self):
        g = repeat_with_confuse(tiny_symmetric_game(), 2, 0)
        assert evaluate_deterministic(g, CoordinatewiseStrategy(lambda q: 0)) == 1

    def test_product_value_for_independent_play(self):
        # a fixed answer per question loses repeated rounds independently
        src = tiny_symmetric_game()
        g = repeat_with_confuse(src, 2, 0)
        flip = CoordinatewiseStrategy(lambda q: q)
        assert evaluate_deterministic(g, flip) == Fraction(1, 4)

    def test_cap(self):
        with pytest.raises(TooLarge):
            repeat_with_confuse(tiny_symmetric_game(), 3, 3).rounds()

    def test_validation(self):
        with pytest.raises(InputError):
            repeat_with_confuse(tiny_symmetric_game(), 0, 1)


class TestFourier:
    def test_parseval(self):
        rng = np.random.default_rng(0)
        A = 1 - 2 * rng.integers(0, 2, size=1 << 8)
        assert abs(fourier_transform(A, 3).parseval() - 1) < 1e-12

    def test_dictator(self):
        t = fourier_transform(dictator(2, 3), 2)
        assert t.support() == [1 << 3]
        assert FourierDecoder(t).distribution() == {3: 1.0}

    def test_inverse(self):
        rng = np.random.default_rng(1)
        A = rng.normal(size=1 << 4)
        assert np.allclose(fourier_transform(A, 2).inverse(), A)

    def test_folding_is_odd(self):
        rng = np.random.default_rng(2)
        A = 1 - 2 * rng.integers(0, 2, size=1 << 4)
        F = fold(A, 2)
        neg = negate_index(2)
        for f in range(1 << 4):
            assert F[f ^ neg] == -F[f]
        # odd functions have no weight on even-size sets
        t = fourier_transform(F, 2)
        assert all(bin(a).count("1") % 2 == 1 for a in t.support())

    def test_operator_valued(self):
        rng = np.random.default_rng(3)
        ops = np.stack([np.diag(1 - 2 * rng.integers(0, 2, size=2)).astype(float) for _ in range(16)])
        assert abs(fourier_transform(ops, 2).parseval() - 1) < 1e-12

    def test_cap(self):
        with pytest.raises(TooLarge):
            fourier_transform(np.zeros(4), 5)

    def test_walsh_length(self):
        with pytest.raises(InputError):
            walsh_hadamard(np.zeros(3))


class TestXorGadget:
    @given(st.lists(st.integers(0, 1), min_size=8, max_size=8))
    def test_representative(self, bits):
        table = np.array(bits, dtype=np.uint8)
        rep, s = representative(table)
        assert rep[0] == 0
        assert np.array_equal(rep ^ s, table)
        assert np.array_equal(unpack(pack(rep), 3), rep)
        assert all(table_bit(pack(rep), i) == rep[i] for i in range(8))

    def test_noiseless_completeness(self):
        cnf, asg = planted(4, 4, 1)
        binary = binarize_game(ClauseVariableGame(cnf))
        game = xor_gadget(binary, 0.0)
        lifted = LiftedStrategy(binary, AssignmentAnswers(cnf, asg))
        res = monte_carlo_value(game, LongCodeStrategy(lifted.answer), 400, seed=5)
        assert res.accepted == res.rounds

    def test_single_flip_always_loses(self):
        cnf, asg = planted(4, 4, 1)
        binary = binarize_game(ClauseVariableGame(cnf))
        game = xor_gadget(binary, 0.0)
        lifted = LiftedStrategy(binary, AssignmentAnswers(cnf, asg))
        res = monte_carlo_value(game, LongCodeStrategy(lifted.answer, flip=(0,)), 200, seed=6)
        assert res.accepted == 0

    def test_validation(self):
        cnf, _ = planted(4, 4, 1)
        binary = binarize_game(ClauseVariableGame(cnf))
        with pytest.raises(InputError):
            xor_gadget(binary, 0.6)
        with pytest.raises(InvalidGame):
            xor_gadget(ClauseVariableGame(cnf), 0.1)
        with pytest.raises(InvalidGame):
            xor_gadget(chsh_game(), 0.1)

    def test_non_bit_answers(self):
        cnf, _ = planted(4, 4, 1)
        game = xor_gadget(binarize_game(ClauseVariableGame(cnf)), 0.0)
        rnd = game.sample(np.random.default_rng(7))
        assert not game.check(rnd, (0, 1, 2))
        assert not game.check(rnd, (True, 0, 0))


class TestPipeline:
    @pytest.mark.parametrize("stage", STAGES)
    def test_every_stage_is_complete(self, stage):
        cnf, asg = planted(5, 6, 2)
        cfg = ReductionConfig(K=2, K2=1, eps_xor=0.0, modulus=97)
        game, manifest, _ = build_stage(cnf, stage, cfg, seed=1)
        res = monte_carlo_value(game, honest_strategy(game, cnf, stage, asg), 150, seed=8)
        assert res.accepted == res.rounds
        assert [s["stage"] for s in manifest.stages][-1] in (stage, "source") or stage == "gphi"

    def test_manifest_round_trip(self):
        cnf, _ = planted()
        _, manifest, _ = build_stage(cnf, "xor")
        again = PipelineManifest.from_dict(manifest.as_dict())
        assert again.as_dict() == manifest.as_dict()

    def test_bad_manifest(self):
        with pytest.raises(InputError):
            PipelineManifest.from_dict({"stage": "xor"})

    def test_unknown_stage(self):
        cnf, _ = planted()
        with pytest.raises(InputError):
            build_stage(cnf, "magic")

    def test_witness_length(self):
        cnf, asg = planted()
        game, _, _ = build_stage(cnf, "binary")
        with pytest.raises(InputError):
            honest_strategy(game, cnf, "binary", asg[:-1])

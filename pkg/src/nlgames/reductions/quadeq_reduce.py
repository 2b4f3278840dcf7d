"""Answer binarisation: each pair predicate becomes a QUADEQ instance.

A predicate V(a1, a2) on two m-bit answers is written in algebraic normal
form over F_2 (a XOR of monomials in the 2m answer bits).  Monomials of
degree <= 2 are quadratic terms already; each higher one is built by a chain
of AND gates y = y_prev * x, one auxiliary variable and one quadratic
equation per gate, with prefixes shared between monomials.  The final
equation states that the normal form evaluates to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import InputError, InvalidGame
from ..gamecore import Game, Round, Strategy
from ..protocols.common import LRU
from ..protocols.linearity import QuadeqInstance, QuadeqTest, parity, tensor_mask


def anf(truth: np.ndarray) -> np.ndarray:
    """Möbius transform over F_2: coefficient of each monomial (bitmask of variables)."""
    c = np.array(truth, dtype=np.uint8) & 1
    n = c.size
    step = 1
    while step < n:
        c = c.reshape(-1, 2 * step)
        c[:, step:] ^= c[:, :step]
        c = c.reshape(-1)
        step *= 2
    return c


@dataclass(frozen=True)
class PairArithmetization:
    instance: QuadeqInstance
    m: int
    gates: tuple  # (aux index, left operand index, right operand index)

    def witness(self, a1: int, a2: int) -> int:
        """Full variable vector with auxiliary gate values filled in."""
        x = a1 | (a2 << self.m)
        for out, left, right in self.gates:
            if (x >> left) & (x >> right) & 1:
                x |= 1 << out
        return x


def predicate_to_quadeq(accept: Callable | set, m: int) -> PairArithmetization:
    """QUADEQ over (a1 bits, a2 bits, gate outputs) satisfied exactly on accepted pairs."""
    if m < 1:
        raise InputError("answers need at least one bit")
    size = 1 << (2 * m)
    truth = np.zeros(size, dtype=np.uint8)
    if callable(accept):
        for a1 in range(1 << m):
            for a2 in range(1 << m):
                truth[a1 | (a2 << m)] = 1 if accept(a1, a2) else 0
    else:
        for a1, a2 in accept:
            truth[int(a1) | (int(a2) << m)] = 1
    coeffs = anf(truth)
    nvars = 2 * m
    prefix: dict[tuple, int] = {}
    gates = []
    gate_eqs = []
    main_pairs: set = set()
    constant = 0

    def toggle(pair):
        if pair in main_pairs:
            main_pairs.remove(pair)
        else:
            main_pairs.add(pair)

    for mono in np.nonzero(coeffs)[0]:
        vars_ = [i for i in range(nvars) if (int(mono) >> i) & 1]
        if not vars_:
            constant ^= 1
        elif len(vars_) == 1:
            toggle((vars_[0], vars_[0]))
        elif len(vars_) == 2:
            toggle((vars_[0], vars_[1]))
        else:
            node = vars_[0]
            for k in range(1, len(vars_)):
                key = tuple(vars_[: k + 1])
                if key not in prefix:
                    out = nvars + len(gates)
                    prefix[key] = out
                    gates.append((out, node, vars_[k]))
                    # out = node * x  <=>  node*x + out*out = 0
                    gate_eqs.append(([(node, vars_[k]), (out, out)], 0))
                node = prefix[key]
            toggle((node, node))
    equations = list(gate_eqs)
    rhs = 1 ^ constant
    if main_pairs or rhs:
        equations.append((sorted(main_pairs), rhs))
    inst = QuadeqInstance(m, tuple(equations), len(gates))
    return PairArithmetization(inst, m, tuple(gates))


def satisfying_pairs(arith: PairArithmetization) -> set:
    """Exhaustive oracle: projections to (a1, a2) of all satisfying assignments."""
    inst = arith.instance
    m = arith.m
    out = set()
    for x in inst.solutions():
        out.add((x & ((1 << m) - 1), (x >> m) & ((1 << m) - 1)))
    return out


# ---------------------------------------------------------------------------
# binarised game


def _queried_pair(rnd: Round):
    qs = [(i, q) for i, q in enumerate(rnd.questions) if q is not None]
    if len(qs) != 2:
        raise InvalidGame("binarisation needs rounds that query exactly two players")
    return qs[0][1], qs[1][1]


class BinarizedGame(Game):
    """Sample (q1, q2) from the source, then run the QUADEQ test of V(.,.|q1,q2).

    Labels are the source questions themselves, so the chunk of answer bits
    for question q is shared by every pair that contains q.
    """

    def __init__(self, source: Game, m: int | None = None, cache: int = 4096):
        if not source.symmetric:
            raise InvalidGame("binarisation expects a symmetric source game")
        if source.answer_alphabet is None:
            raise InvalidGame("source answers must be a finite alphabet of ints")
        size = len(source.answer_alphabet)
        self.m = m or max(1, math.ceil(math.log2(size)))
        if list(source.answer_alphabet) != list(range(size)) or size > 1 << self.m:
            raise InvalidGame("source answers must be the integers 0..2^m-1")
        self.source = source
        self.r = source.r
        self.name = f"binarized({source.name})"
        self.symmetric = True
        self.answer_alphabet = (0, 1)
        self._psi = LRU(cache)
        self._tests = LRU(cache)

    def pair_predicate(self, q1, q2) -> Callable:
        r = self.source.r

        def accept(a1, a2):
            qs = (q1, q2) + (None,) * (r - 2)
            ans = (a1, a2) + (None,) * (r - 2)
            return self.source.check(Round(qs), ans)

        return accept

    def psi(self, q1, q2) -> PairArithmetization:
        return self._psi.get((q1, q2), lambda: predicate_to_quadeq(self.pair_predicate(q1, q2), self.m))

    def test(self, q1, q2) -> QuadeqTest:
        return self._tests.get((q1, q2), lambda: QuadeqTest(self.psi(q1, q2).instance, self.r, (q1, q2)))

    def sample(self, rng):
        q1, q2 = _queried_pair(self.source.sample(rng))
        inner = self.test(q1, q2).sample(rng)
        return Round(inner.questions, ("bin", q1, q2, inner.context))

    def check(self, rnd, answers):
        _, q1, q2, ctx = rnd.context
        return self.test(q1, q2).check(Round(rnd.questions, ctx), answers)

    def question_bits(self, q1_bits: int) -> int:
        """Longest question: two labels plus an n^2-bit vector (n includes gates)."""
        worst = 0
        for (q1, q2), arith in list(self._psi.data.items()):
            n = arith.instance.n
            worst = max(worst, n * n)
        return 2 * q1_bits + worst + 2


class LiftedStrategy(Strategy):
    """Honest binarised strategy from a deterministic source answer function."""

    def __init__(self, game: BinarizedGame, answer: Callable):
        self.game = game
        self.source_answer = answer
        self._full = LRU(4096)

    def full_vector(self, q1, q2):
        def make():
            arith = self.game.psi(q1, q2)
            x = arith.witness(self.source_answer(q1), self.source_answer(q2))
            n = arith.instance.n
            return x, n, tensor_mask(x, n)

        return self._full.get((q1, q2), make)

    def answer(self, question):
        _, labels, nbits, mask = question
        if len(labels) == 1:
            return parity(mask & self.source_answer(labels[0]))
        x, n, xx = self.full_vector(*labels)
        return parity(mask & (x if nbits == n else xx))

    def respond(self, rnd, rng=None):
        return tuple(None if q is None else self.answer(q) for q in rnd.questions)


def binarize_game(source: Game, m: int | None = None) -> BinarizedGame:
    return BinarizedGame(source, m)

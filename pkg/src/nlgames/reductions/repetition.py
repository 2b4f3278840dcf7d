"""Oracularisation and repetition with confuse questions.

Oracularised rounds hand the whole question tuple of a source round to one
player and one of its coordinates to another.  The repeated game then stacks
K such rounds with K' confuse slots whose questions are drawn independently
from each role's marginal and whose answers are ignored.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable


from ..errors import InputError, InvalidGame, TooLarge
from ..gamecore import Game, Round, Strategy, merge_rounds
from ..protocols.common import ordered_players, place, player_tuples


class OracularizedGame(Game):
    """Triple player answers every coordinate; single player answers one of them."""

    def __init__(self, source: Game):
        if not source.symmetric:
            raise InvalidGame("oracularisation expects a symmetric source game")
        self.source = source
        self.r = source.r
        self.name = f"oracularized({source.name})"
        self.symmetric = True
        self.answer_alphabet = None

    def build(self, inner: Round, i: int, j: int, k: int) -> Round:
        qs = {i: ("triple", inner.questions), j: ("single", inner.questions[k])}
        return Round(place(self.r, qs), ("orc", i, j, k, inner))

    def sample(self, rng):
        inner = self.source.sample(rng)
        queried = inner.queried
        k = queried[int(rng.integers(0, len(queried)))]
        i, j = ordered_players(rng, self.r, 2)
        return self.build(inner, i, j, k)

    def roles(self, rnd: Round) -> tuple[int, int]:
        """(triple player, single player)."""
        return rnd.context[1], rnd.context[2]

    def check(self, rnd, answers):
        _, i, j, k, inner = rnd.context
        triple, b = answers[i], answers[j]
        if not isinstance(triple, tuple) or len(triple) != len(inner.questions):
            return False
        if any((a is None) != (q is None) for a, q in zip(triple, inner.questions)):
            return False
        return self.source.accepts(inner, triple) and b == triple[k]

    def rounds(self):
        out = []
        pairs = player_tuples(self.r, 2)
        for inner, w in self.source.rounds():
            queried = inner.queried
            wk = w / (len(queried) * len(pairs))
            for k in queried:
                for i, j in pairs:
                    out.append((self.build(inner, i, j, k), wk))
        return merge_rounds(out)


def oracularize(source: Game) -> OracularizedGame:
    return OracularizedGame(source)


class CoordinatewiseStrategy(Strategy):
    """Answers every token of the derived games through one source answer function."""

    def __init__(self, answer: Callable):
        self.source_answer = answer

    def answer(self, question):
        kind = question[0] if isinstance(question, tuple) and question else None
        if kind == "triple":
            return tuple(None if q is None else self.source_answer(q) for q in question[1])
        if kind == "single":
            return self.source_answer(question[1])
        if kind == "rep":
            return tuple(self.answer(q) for q in question[1])
        return self.source_answer(question)

    def respond(self, rnd, rng=None):
        return tuple(None if q is None else self.answer(q) for q in rnd.questions)


def oracularized_classical_value(source: Game, cap: int = 10**6) -> Fraction:
    """Exact classical value of the oracularised game.

    Enumerates every tuple of single-question answer functions; the triple
    player then best-responds per (round, player) since it does not see who
    holds the single question.
    """
    if source.answer_alphabet is None:
        raise InputError("exact value needs a finite answer alphabet")
    alphabet = list(source.answer_alphabet)
    rounds = source.rounds()
    r = source.r
    qindex: dict = {}
    for rnd, _ in rounds:
        for q in rnd.questions:
            if q is not None:
                qindex.setdefault(q, len(qindex))
    nq, na = len(qindex), len(alphabet)
    count = na ** (nq * r)
    if count * len(rounds) > cap:
        raise TooLarge(f"{count} single-answer strategy tuples exceed cap {cap}")
    # accepted answer tuples per round, as index tuples on the queried positions
    prepared = []
    for rnd, w in rounds:
        queried = rnd.queried
        acc = []
        for combo in itertools.product(range(na), repeat=len(queried)):
            ans = [None] * r
            for pos, a in zip(queried, combo):
                ans[pos] = alphabet[a]
            if source.accepts(rnd, tuple(ans)):
                acc.append(combo)
        qidx = [qindex[rnd.questions[p]] for p in queried]
        prepared.append((w, qidx, acc))
    pairs = r * (r - 1)
    best = Fraction(0)
    for flat in itertools.product(range(na), repeat=nq * r):
        b = [flat[p * nq : (p + 1) * nq] for p in range(r)]
        total = Fraction(0)
        for w, qidx, acc in prepared:
            if not acc:
                continue
            nk = len(qidx)
            inner = 0
            for i in range(r):
                top = 0
                for combo in acc:
                    hits = sum(b[j][qidx[t]] == combo[t] for j in range(r) if j != i for t in range(nk))
                    top = max(top, hits)
                inner += top
            total += w * Fraction(inner, pairs * nk)
        best = max(best, total)
    return best


# ---------------------------------------------------------------------------
# repetition with confuse questions


def _default_roles(rnd: Round) -> tuple[int, int]:
    queried = rnd.queried
    if len(queried) != 2:
        raise InvalidGame("repetition needs rounds that query exactly two players")
    return queried[0], queried[1]


class RepeatedConfuseGame(Game):
    """K real rounds and K' confuse slots, shuffled by one shared permutation."""

    def __init__(self, base: Game, K: int, K2: int, enum_cap: int = 10**5):
        if K < 1 or K2 < 0:
            raise InputError("need K >= 1 and K' >= 0")
        self.base = base
        self.K, self.K2 = K, K2
        self.r = base.r
        self.name = f"repeat({base.name},K={K},K'={K2})"
        self.symmetric = True
        self.answer_alphabet = None
        self.enum_cap = enum_cap
        self._roles = getattr(base, "roles", _default_roles)

    def role_questions(self, rnd: Round) -> tuple:
        i, j = self._roles(rnd)
        return rnd.questions[i], rnd.questions[j]

    def build(self, real, confuse, perm, players) -> Round:
        """real: base rounds; confuse: (first, second) question pairs; perm[slot] = source index."""
        first, second = [], []
        for rnd in real:
            a, b = self.role_questions(rnd)
            first.append(a)
            second.append(b)
        for a, b in confuse:
            first.append(a)
            second.append(b)
        p1, p2 = players
        qs = {
            p1: ("rep", tuple(first[s] for s in perm)),
            p2: ("rep", tuple(second[s] for s in perm)),
        }
        return Round(place(self.r, qs), ("rep", p1, p2, tuple(perm), tuple(real)))

    def sample(self, rng):
        real = [self.base.sample(rng) for _ in range(self.K)]
        confuse = []
        for _ in range(self.K2):
            a = self.role_questions(self.base.sample(rng))[0]
            b = self.role_questions(self.base.sample(rng))[1]
            confuse.append((a, b))
        perm = [int(v) for v in rng.permutation(self.K + self.K2)]
        players = ordered_players(rng, self.r, 2)
        return self.build(real, confuse, perm, players)

    def slots(self, rnd: Round) -> dict:
        """Source index -> slot position in the players' tuples."""
        perm = rnd.context[3]
        return {src: pos for pos, src in enumerate(perm)}

    def check(self, rnd, answers):
        _, p1, p2, perm, real = rnd.context
        a1, a2 = answers[p1], answers[p2]
        n = len(perm)
        if not (isinstance(a1, tuple) and isinstance(a2, tuple) and len(a1) == n and len(a2) == n):
            return False
        where = {src: pos for pos, src in enumerate(perm)}
        for k, inner in enumerate(real):
            i, j = self._roles(inner)
            ans = [None] * self.r
            ans[i] = a1[where[k]]
            ans[j] = a2[where[k]]
            if not self.base.accepts(inner, tuple(ans)):
                return False
        return True

    def rounds(self):
        base = self.base.rounds()
        firsts: dict = {}
        seconds: dict = {}
        for rnd, w in base:
            a, b = self.role_questions(rnd)
            firsts[a] = firsts.get(a, Fraction(0)) + w
            seconds[b] = seconds.get(b, Fraction(0)) + w
        n = self.K + self.K2
        perms = list(itertools.permutations(range(n)))
        pairs = player_tuples(self.r, 2)
        confuse = [((a, b), wa * wb) for a, wa in firsts.items() for b, wb in seconds.items()]
        total = len(base) ** self.K * len(confuse) ** self.K2 * len(perms) * len(pairs)
        if total > self.enum_cap:
            raise TooLarge(f"{total} repeated rounds exceed cap {self.enum_cap}")
        scale = Fraction(1, len(perms) * len(pairs))
        out = []
        for real in itertools.product(base, repeat=self.K):
            wr = math.prod((w for _, w in real), start=Fraction(1))
            for conf in itertools.product(confuse, repeat=self.K2):
                wc = math.prod((w for _, w in conf), start=Fraction(1))
                for perm in perms:
                    for players in pairs:
                        rnd = self.build([x for x, _ in real], [c for c, _ in conf], perm, players)
                        out.append((rnd, wr * wc * scale))
        return merge_rounds(out)


def repeat_with_confuse(base: Game, K: int, K2: int) -> RepeatedConfuseGame:
    return RepeatedConfuseGame(base, K, K2)

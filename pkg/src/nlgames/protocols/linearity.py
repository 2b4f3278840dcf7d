"""Linearity test over F_2 and the QUADEQ test built from it.

Vectors of F_2^k are int bitmasks (bit i is coordinate i).  Every question is
``("lin", labels, k, mask)``: a label tuple naming which chunk(s) of variables
the vector refers to, the vector length, and the vector itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..errors import InputError
from ..gamecore import Game, Round, Strategy, merge_rounds
from .common import ordered_players, place, player_tuples


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def random_mask(rng: np.random.Generator, nbits: int) -> int:
    if nbits <= 62:
        return int(rng.integers(0, 1 << nbits)) if nbits else 0
    words = rng.integers(0, 1 << 32, size=(nbits + 31) // 32, dtype=np.uint64)
    v = 0
    for w in words:
        v = (v << 32) | int(w)
    return v & ((1 << nbits) - 1)


def tensor_mask(x: int, n: int) -> int:
    """Bitmask of x (x) x in F_2^{n^2}, coordinate (i, j) at bit i*n + j."""
    out = 0
    i = 0
    v = x
    while v:
        if v & 1:
            out |= x << (i * n)
        v >>= 1
        i += 1
    return out


def outer_mask(u: int, v: int, n: int) -> int:
    out = 0
    i = 0
    while u:
        if u & 1:
            out |= v << (i * n)
        u >>= 1
        i += 1
    return out


def is_bit(a) -> bool:
    return isinstance(a, (int, np.integer)) and not isinstance(a, bool) and a in (0, 1)


def lin_question(labels, nbits: int, mask: int) -> tuple:
    return ("lin", tuple(labels), nbits, mask)


class LinearityTest(Game):
    """x, y uniform; three distinct players get x, y, x+y and must answer a+b=c."""

    def __init__(self, nbits: int, r: int = 3, labels=("f",)):
        if r < 3:
            raise InputError("the linearity test needs r >= 3")
        self.nbits = nbits
        self.r = r
        self.labels = tuple(labels)
        self.name = f"linearity(n={nbits})"
        self.symmetric = True
        self.xor = True
        self.answer_alphabet = (0, 1)

    def round_from_draw(self, x: int, y: int, players) -> Round:
        i, j, k = players
        qs = {
            i: lin_question(self.labels, self.nbits, x),
            j: lin_question(self.labels, self.nbits, y),
            k: lin_question(self.labels, self.nbits, x ^ y),
        }
        return Round(place(self.r, qs), ("lin", i, j, k))

    def sample(self, rng):
        x = random_mask(rng, self.nbits)
        y = random_mask(rng, self.nbits)
        return self.round_from_draw(x, y, ordered_players(rng, self.r, 3))

    def check(self, rnd, answers):
        _, i, j, k = rnd.context
        return lin_check(answers[i], answers[j], answers[k])

    def rounds(self):
        n = self.nbits
        triples = player_tuples(self.r, 3)
        w = Fraction(1, (1 << (2 * n)) * len(triples))
        out = []
        for x in range(1 << n):
            for y in range(1 << n):
                for t in triples:
                    out.append((self.round_from_draw(x, y, t), w))
        return out


def lin_check(a, b, c) -> bool:
    return is_bit(a) and is_bit(b) and is_bit(c) and c == a ^ b


class LinearStrategy(Strategy):
    """Every player answers u . x for a fixed u (optionally flipped by ``offset``)."""

    def __init__(self, u: int, offset: int = 0):
        self.u = u
        self.offset = offset

    def answer(self, question):
        return parity(self.u & question[3]) ^ self.offset

    def respond(self, rnd, rng=None):
        return tuple(None if q is None else self.answer(q) for q in rnd.questions)


# ---------------------------------------------------------------------------
# QUADEQ


@dataclass(frozen=True)
class QuadeqInstance:
    """Equations sum_{(i,j)} x_i x_j = c over F_2.

    The variable vector is (chunk 1, chunk 2, auxiliary): ``n_chunk`` variables
    per chunk followed by ``n_aux`` auxiliary ones.  Each equation is a
    frozenset of index pairs (i <= j) and a constant bit; x_i x_i = x_i gives
    linear terms.
    """

    n_chunk: int
    equations: tuple
    n_aux: int = 0

    def __post_init__(self):
        n = self.n
        eqs = []
        for pairs, c in self.equations:
            norm = frozenset((min(i, j), max(i, j)) for i, j in pairs)
            for i, j in norm:
                if not 0 <= i < n or not 0 <= j < n:
                    raise InputError(f"index pair {(i, j)} outside 0..{n - 1}")
            if c not in (0, 1):
                raise InputError(f"constant {c} is not a bit")
            eqs.append((norm, int(c)))
        if self.n_chunk < 1:
            raise InputError("chunks need at least one variable")
        object.__setattr__(self, "equations", tuple(eqs))

    @property
    def n(self) -> int:
        return 2 * self.n_chunk + self.n_aux

    @property
    def K(self) -> int:
        return len(self.equations)

    def coefficient_mask(self, k: int) -> int:
        """a^(k) as a bitmask over F_2^{n^2}."""
        n = self.n
        out = 0
        for i, j in self.equations[k][0]:
            out ^= 1 << (i * n + j)
        return out

    def evaluate(self, k: int, x: int) -> int:
        pairs, _ = self.equations[k]
        return sum((x >> i) & (x >> j) & 1 for i, j in pairs) & 1

    def satisfied_by(self, x: int) -> bool:
        return all(self.evaluate(k, x) == c for k, (_, c) in enumerate(self.equations))

    def violated(self, x: int) -> list[int]:
        return [k for k, (_, c) in enumerate(self.equations) if self.evaluate(k, x) != c]

    def join(self, x1: int, x2: int, aux: int = 0) -> int:
        h = self.n_chunk
        return x1 | (x2 << h) | (aux << (2 * h))

    def solutions(self, cap: int = 1 << 22) -> list[int]:
        if 1 << self.n > cap:
            raise InputError(f"2^{self.n} assignments exceed enumeration cap")
        return [x for x in range(1 << self.n) if self.satisfied_by(x)]

    def to_text(self) -> str:
        lines = [f"{self.K} {2 * self.n_chunk}" + (f" {self.n_aux}" if self.n_aux else "")]
        for pairs, c in self.equations:
            body = " ".join(f"{i} {j}" for i, j in sorted(pairs))
            lines.append(f"{c} {body}".rstrip())
        return "\n".join(lines) + "\n"


def parse_quadeq(text: str) -> QuadeqInstance:
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InputError("empty QUADEQ text")
    head = [int(t) for t in lines[0].split()]
    if len(head) not in (2, 3):
        raise InputError("header must be 'K n' or 'K n aux'")
    K, n = head[0], head[1]
    aux = head[2] if len(head) == 3 else 0
    if n % 2:
        raise InputError("chunked variable count n must be even")
    eqs = []
    for ln in lines[1:]:
        toks = [int(t) for t in ln.split()]
        if (len(toks) - 1) % 2:
            raise InputError(f"odd index list in {ln!r}")
        pairs = list(zip(toks[1::2], toks[2::2]))
        eqs.append((pairs, toks[0]))
    if len(eqs) != K:
        raise InputError(f"header promises {K} equations, found {len(eqs)}")
    return QuadeqInstance(n // 2, tuple(eqs), aux)


def read_quadeq(path) -> QuadeqInstance:
    return parse_quadeq(Path(path).read_text())


class QuadeqTest(Game):
    """Four equally likely branches: linearity tests, chunk consistency, tensor
    consistency, and a random linear combination of the equations."""

    def __init__(self, inst: QuadeqInstance, r: int = 3, labels=("l1", "l2")):
        if r < 3:
            raise InputError("the QUADEQ test needs r >= 3")
        self.inst = inst
        self.r = r
        self.l1, self.l2 = labels
        self.name = f"quadeq(n={inst.n},K={inst.K})"
        self.symmetric = True
        self.answer_alphabet = (0, 1)
        self._amasks = [inst.coefficient_mask(k) for k in range(inst.K)]
        h, n = inst.n_chunk, inst.n
        self._lin = [
            LinearityTest(h, r, (self.l1,)),
            LinearityTest(h, r, (self.l2,)),
            LinearityTest(n, r, (self.l1, self.l2)),
            LinearityTest(n * n, r, (self.l1, self.l2)),
        ]

    @property
    def pair(self) -> tuple:
        return (self.l1, self.l2)

    def sample(self, rng):
        branch = int(rng.integers(0, 4))
        inst = self.inst
        h, n = inst.n_chunk, inst.n
        if branch == 0:
            sub = int(rng.integers(0, 4))
            return self._lin[sub].sample(rng)
        if branch == 1:
            u, v = random_mask(rng, h), random_mask(rng, h)
            return self.chunk_round(u, v, ordered_players(rng, self.r, 3))
        if branch == 2:
            u, v = random_mask(rng, n), random_mask(rng, n)
            return self.tensor_round(u, v, ordered_players(rng, self.r, 3))
        sel = random_mask(rng, inst.K)
        return self.equation_round(sel, int(rng.integers(0, self.r)))

    def chunk_round(self, u, v, players) -> Round:
        h = self.inst.n_chunk
        i, j, k = players
        qs = {
            i: lin_question((self.l1,), h, u),
            j: lin_question((self.l2,), h, v),
            k: lin_question(self.pair, self.inst.n, u | (v << h)),
        }
        return Round(place(self.r, qs), ("chunk", i, j, k))

    def tensor_round(self, u, v, players) -> Round:
        n = self.inst.n
        i, j, k = players
        qs = {
            i: lin_question(self.pair, n, u),
            j: lin_question(self.pair, n, v),
            k: lin_question(self.pair, n * n, outer_mask(u, v, n)),
        }
        return Round(place(self.r, qs), ("tensor", i, j, k))

    def equation_round(self, sel: int, player: int) -> Round:
        w = 0
        c = 0
        for k in range(self.inst.K):
            if (sel >> k) & 1:
                w ^= self._amasks[k]
                c ^= self.inst.equations[k][1]
        n = self.inst.n
        return Round(place(self.r, {player: lin_question(self.pair, n * n, w)}), ("equation", player, c))

    def check(self, rnd, answers):
        kind = rnd.context[0]
        if kind == "lin":
            return LinearityTest.check(None, rnd, answers)
        if kind == "chunk":
            _, i, j, k = rnd.context
            return lin_check(answers[i], answers[j], answers[k])
        if kind == "tensor":
            _, i, j, k = rnd.context
            a, b, c = answers[i], answers[j], answers[k]
            return is_bit(a) and is_bit(b) and is_bit(c) and (a & b) == c
        _, i, c = rnd.context
        return is_bit(answers[i]) and answers[i] == c

    def rounds(self):
        inst = self.inst
        h, n = inst.n_chunk, inst.n
        if 2 * n * n > 20 or inst.K > 16:
            raise InputError("exhaustive QUADEQ enumeration needs n^2 <= 10 and K <= 16")
        out = []
        quarter = Fraction(1, 4)
        for lin in self._lin:
            out += [(rnd, w * quarter * quarter) for rnd, w in lin.rounds()]
        triples = player_tuples(self.r, 3)
        w = quarter / ((1 << (2 * h)) * len(triples))
        out += [(self.chunk_round(u, v, t), w) for u in range(1 << h) for v in range(1 << h) for t in triples]
        w = quarter / ((1 << (2 * n)) * len(triples))
        out += [(self.tensor_round(u, v, t), w) for u in range(1 << n) for v in range(1 << n) for t in triples]
        w = quarter / ((1 << inst.K) * self.r)
        out += [(self.equation_round(sel, i), w) for sel in range(1 << inst.K) for i in range(self.r)]
        return merge_rounds(out)


class QuadeqAssignmentStrategy(Strategy):
    """Answers every linear query from fixed chunk values and full vectors.

    ``chunks`` maps a single label to its chunk bits; ``full`` maps a label
    pair to ``(x, n)``, the full variable vector (chunk 1, chunk 2, auxiliary)
    and its length.  Length-n queries on the pair see x, length-n^2 queries
    see x (x) x.
    """

    def __init__(self, chunks: dict, full: dict):
        self.chunks = dict(chunks)
        self.full = {tuple(k): v for k, v in full.items()}
        self._tensor: dict = {}

    def answer(self, question):
        _, labels, nbits, mask = question
        if len(labels) == 1:
            return parity(mask & self.chunks[labels[0]])
        x, n = self.full[labels]
        if nbits == n:
            return parity(mask & x)
        if labels not in self._tensor:
            self._tensor[labels] = tensor_mask(x, n)
        return parity(mask & self._tensor[labels])

    def respond(self, rnd, rng=None):
        return tuple(None if q is None else self.answer(q) for q in rnd.questions)


def honest_quadeq_strategy(inst: QuadeqInstance, x: int, labels=("l1", "l2")) -> QuadeqAssignmentStrategy:
    """Answers consistent with the full assignment x (chunk 1, chunk 2, aux)."""
    h = inst.n_chunk
    mask = (1 << h) - 1
    return QuadeqAssignmentStrategy(
        {labels[0]: x & mask, labels[1]: (x >> h) & mask}, {tuple(labels): (x, inst.n)}
    )

"""Three-player XOR game built from a binary-answer game by long-code folding.

Conventions: the ±1 value v is stored as the bit b with v = (-1)^b, so bit 1
means -1 means "true".  A function on {±1}^V (V an ordered tuple of source
questions) is a uint8 truth table indexed by the bitmask y whose bit t is the
value of V[t].  Products of ±1 values are XORs of bits and the "and" used
for folding over ψ is the bitwise AND.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import InputError, InvalidGame, TooLarge
from ..gamecore import Game, Round, Strategy

Z_CAP = 16


def representative(table: np.ndarray) -> tuple[np.ndarray, int]:
    """(member of {f, -f} equal to +1 on the all-false input, sign bit)."""
    s = int(table[0])
    return table ^ np.uint8(s), s


def projection(outer: tuple, inner: tuple) -> np.ndarray:
    """For every y over ``outer``, the index of y restricted to ``inner``."""
    pos = {v: t for t, v in enumerate(outer)}
    return _projection(len(outer), tuple(pos[v] for v in inner))


@lru_cache(maxsize=4096)
def _projection(n_outer: int, positions: tuple) -> np.ndarray:
    ys = np.arange(1 << n_outer, dtype=np.int64)
    out = np.zeros_like(ys)
    for t, p in enumerate(positions):
        out |= ((ys >> p) & 1) << t
    out.flags.writeable = False
    return out


def pack(table: np.ndarray) -> bytes:
    return np.packbits(table.astype(np.uint8)).tobytes()


def table_bit(packed: bytes, index: int) -> int:
    return (packed[index >> 3] >> (7 - (index & 7))) & 1


def unpack(packed: bytes, nvars: int) -> np.ndarray:
    return np.unpackbits(np.frombuffer(packed, dtype=np.uint8))[: 1 << nvars]


def _order(items) -> tuple:
    return tuple(sorted(set(items), key=repr))


class XorGadgetGame(Game):
    """K real and K' confuse source rounds; f over U, g1∧ψ over W, g2∧ψ over Z."""

    def __init__(self, source: Game, eps: float, K: int = 1, K2: int = 1, z_cap: int = Z_CAP):
        if source.r != 3:
            raise InvalidGame("the XOR gadget reduces three-player games")
        if list(source.answer_alphabet or ()) != [0, 1]:
            raise InvalidGame("the XOR gadget needs binary answers")
        if not 0 <= eps < 0.5:
            raise InputError("noise rate must lie in [0, 1/2)")
        if K < 1 or K2 < 0:
            raise InputError("need K >= 1 and K' >= 0")
        self.source = source
        self.eps = eps
        self.K, self.K2 = K, K2
        self.z_cap = z_cap
        self.r = 3
        self.xor = True
        self.symmetric = True
        self.answer_alphabet = (0, 1)
        self.name = f"xor-gadget({source.name},eps={eps},K={K},K'={K2})"

    @staticmethod
    def _pick_queried(rnd: Round, rng) -> object:
        queried = rnd.queried
        return rnd.questions[queried[int(rng.integers(0, len(queried)))]]

    def psi_table(self, rounds, W: tuple) -> np.ndarray:
        """Bit 1 where every source round accepts the answers read off y."""
        ok = np.ones(1 << len(W), dtype=bool)
        for rnd in rounds:
            local = _order(q for q in rnd.questions if q is not None)
            verdict = np.zeros(1 << len(local), dtype=bool)
            for y in range(1 << len(local)):
                bit = {v: (y >> t) & 1 for t, v in enumerate(local)}
                answers = tuple(None if q is None else bit[q] for q in rnd.questions)
                verdict[y] = self.source.accepts(rnd, answers)
            ok &= verdict[projection(W, local)]
        return ok.astype(np.uint8)

    def sample(self, rng):
        n = self.K + self.K2
        rounds = [self.source.sample(rng) for _ in range(n)]
        ws = [self._pick_queried(rounds[k], rng) for k in range(self.K)]
        ws += [self._pick_queried(self.source.sample(rng), rng) for _ in range(self.K2)]
        W = _order(q for rnd in rounds for q in rnd.questions if q is not None)
        U = _order(ws)
        Z = _order(U + W)
        if len(Z) > self.z_cap:
            raise TooLarge(f"|Z| = {len(Z)} exceeds cap {self.z_cap}")
        psi = self.psi_table(rounds, W)
        f = rng.integers(0, 2, size=1 << len(U), dtype=np.uint8)
        g1 = rng.integers(0, 2, size=1 << len(W), dtype=np.uint8)
        mu = (rng.random(1 << len(Z)) < self.eps).astype(np.uint8)
        zu, zw = projection(Z, U), projection(Z, W)
        g2 = f[zu] ^ g1[zw] ^ mu
        tables = [f, g1 & psi, g2 & psi[zw]]
        order = [int(v) for v in rng.permutation(3)]
        qs = [None] * 3
        signs = []
        for slot, (V, table) in enumerate(zip((U, W, Z), tables)):
            rep, s = representative(table)
            signs.append(s)
            qs[order[slot]] = ("xor", V, pack(rep))
        return Round(tuple(qs), ("xor", tuple(order), tuple(signs)))

    def check(self, rnd, answers):
        if any(a not in (0, 1) or isinstance(a, bool) for a in answers):
            return False
        _, _, signs = rnd.context
        return (answers[0] ^ answers[1] ^ answers[2]) == (signs[0] ^ signs[1] ^ signs[2])


def xor_gadget(source: Game, eps: float, K: int = 1, K2: int = 1, z_cap: int = Z_CAP) -> XorGadgetGame:
    return XorGadgetGame(source, eps, K, K2, z_cap)


class LongCodeStrategy(Strategy):
    """Evaluate each received table at the assignment given by a source answer function."""

    def __init__(self, answer, flip: tuple = ()):
        self.source_answer = answer
        self.flip = frozenset(flip)

    def answer(self, question) -> int:
        _, V, packed = question
        idx = 0
        for t, v in enumerate(V):
            idx |= (int(self.source_answer(v)) & 1) << t
        return table_bit(packed, idx)

    def respond(self, rnd, rng=None):
        return tuple(self.answer(q) ^ (i in self.flip) for i, q in enumerate(rnd.questions))

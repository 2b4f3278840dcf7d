"""First stage: the clause-checking game of a CNF, plus a compact source game.

``build_game_Gphi`` wraps the polynomial 3-SAT test with a field chosen from
an interval driven by the target gap.  Its answers are polynomials, far too
long to arithmetise bit by bit, so the later answer-reduction stages start
from :class:`ClauseVariableGame`, a symmetric two-of-three projection game
with 3-bit answers over the same formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import InputError
from ..field import is_prime, make_field, next_prime
from ..gamecore import Game, Round
from ..protocols.cnf import CNF
from ..protocols.common import ordered_players, place, player_tuples
from ..protocols.sat import SatTest, SatTestParams, sat_params, sat_shape, variable_point


@dataclass(frozen=True)
class ReductionConfig:
    """Knobs standing in for the unspecified constants of the pipeline."""

    eps1: float = 0.1
    exponent: int = 3
    K: int = 8
    K2: int = 8
    eps_xor: float = 0.05
    xor_K: int = 1
    xor_K2: int = 1
    modulus: int | None = None

    def __post_init__(self):
        if not self.eps1 > 0 or self.exponent < 1:
            raise InputError("eps1 and exponent must be positive")
        if self.K < 1 or self.K2 < 0 or self.xor_K < 1 or self.xor_K2 < 0:
            raise InputError("need K >= 1 real rounds and K' >= 0 confuse rounds")
        if not 0 <= self.eps_xor < 0.5:
            raise InputError("XOR noise must lie in [0, 1/2)")

    def as_dict(self) -> dict:
        return {
            "eps1": self.eps1,
            "exponent": self.exponent,
            "K": self.K,
            "K2": self.K2,
            "eps_xor": self.eps_xor,
            "xor_K": self.xor_K,
            "xor_K2": self.xor_K2,
            "modulus": self.modulus,
        }


@dataclass
class FieldChoice:
    q: int
    low: int
    high: int
    widened: int = 0

    def as_dict(self) -> dict:
        return {"q": self.q, "low": self.low, "high": self.high, "widened": self.widened}


def choose_modulus(n: int, eps1: float, exponent: int, floor: int = 5) -> FieldChoice:
    """Prime in [(log n/eps1)^e, 2 (log n/eps1)^e]; the upper end doubles until one exists."""
    target = (math.log2(n) / eps1) ** exponent
    low = max(floor, math.ceil(target))
    high = max(low, math.floor(2 * target))
    widened = 0
    while True:
        p = next_prime(low)
        if p <= high:
            return FieldChoice(p, low, high, widened)
        high *= 2
        widened += 1


@dataclass
class GphiHandle:
    game: SatTest
    params: SatTestParams
    field: FieldChoice
    question_bits: int
    answer_bits: int
    plane_bound_bits: int
    extra: dict = field(default_factory=dict)

    def report(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "field": self.field.as_dict(),
            "question_bits": self.question_bits,
            "answer_bits": self.answer_bits,
            "six_m_log_q": self.plane_bound_bits,
            "within_six_m_log_q": self.question_bits <= self.plane_bound_bits,
        }


def sat_question_bits(params: SatTestParams) -> int:
    """Longest question of the test, in bits (plane pairs or curve queries)."""
    lq = math.ceil(math.log2(params.q))
    m, m2 = params.m, params.m2
    plane_pair = (3 * m + 3 * m2) * lq
    curve_pair = (4 * m + 4 * m2) * lq
    return max(plane_pair, curve_pair) + 3  # three bits name the query type


def sat_answer_bits(params: SatTestParams) -> int:
    lq = math.ceil(math.log2(params.q))
    d2 = params.d2
    bivariate = (d2 + 1) * (d2 + 2) // 2
    lifted_plane = 2 * math.ceil(math.log2(params.d + 1))
    two_level = (lifted_plane + 1) * (lifted_plane + 2) // 2
    curve = 4 * d2 + 1
    return max(bivariate, two_level, curve) * lq


def build_game_Gphi(cnf: CNF, config: ReductionConfig | None = None, r: int = 3) -> GphiHandle:
    config = config or ReductionConfig()
    h, _, d, _ = sat_shape(cnf.n)
    # honest answers interpolate curve restrictions of degree 3d
    floor = max(3 * d + 1, h + 1, 5)
    if config.modulus is not None:
        if not is_prime(config.modulus):
            raise InputError(f"{config.modulus} is not prime")
        choice = FieldChoice(config.modulus, config.modulus, config.modulus)
    else:
        choice = choose_modulus(cnf.n, config.eps1, config.exponent, floor)
    params = sat_params(cnf.n, make_field(choice.q))
    game = SatTest(cnf, r, params.field, params)
    lq = math.ceil(math.log2(choice.q))
    return GphiHandle(
        game,
        params,
        choice,
        sat_question_bits(params),
        sat_answer_bits(params),
        6 * params.m * lq,
    )


# ---------------------------------------------------------------------------
# compact source game


class ClauseVariableGame(Game):
    """One player gets a clause and answers its three variable bits (bit k for
    literal k); another gets one of the clause's variables and answers its bit.
    Accepted iff the clause is satisfied and the two agree on the shared
    variable."""

    answer_bits = 3

    def __init__(self, cnf: CNF, r: int = 3):
        self.cnf = cnf
        self.r = r
        self.name = f"clause-variable(n={cnf.n},m={len(cnf.clauses)})"
        self.symmetric = True
        self.answer_alphabet = tuple(range(8))
        self._vars = [sorted({abs(l) for l in c}) for c in cnf.clauses]

    def sample(self, rng):
        k = int(rng.integers(0, len(self.cnf.clauses)))
        vs = self._vars[k]
        v = vs[int(rng.integers(0, len(vs)))]
        i, j = ordered_players(rng, self.r, 2)
        return Round(place(self.r, {i: ("clause", k), j: ("var", v)}))

    def rounds(self):
        pairs = player_tuples(self.r, 2)
        out = []
        nc = len(self.cnf.clauses)
        for k, vs in enumerate(self._vars):
            for v in vs:
                w = Fraction(1, nc * len(vs) * len(pairs))
                for i, j in pairs:
                    out.append((Round(place(self.r, {i: ("clause", k), j: ("var", v)})), w))
        return out

    def predicate(self, qa, qb, a, b) -> bool:
        """V on one clause question and one variable question (either order)."""
        if qa[0] == "var":
            qa, qb, a, b = qb, qa, b, a
        if qa[0] != "clause" or qb[0] != "var":
            return False
        if not (isinstance(a, (int, np.integer)) and 0 <= a < 8 and b in (0, 1)):
            return False
        clause = self.cnf.padded(self.cnf.clauses[qa[1]])
        bits = [(int(a) >> t) & 1 for t in range(3)]
        values = {}
        for lit, bit in zip(clause, bits):
            if values.setdefault(abs(lit), bit) != bit:
                return False  # a repeated variable must get one value
        if not any(bits[t] == (clause[t] > 0) for t in range(3)):
            return False
        return values.get(qb[1]) == b

    def check(self, rnd, answers):
        qs = [(i, q) for i, q in enumerate(rnd.questions) if q is not None]
        if len(qs) != 2:
            return False
        (i, qa), (j, qb) = qs
        return self.predicate(qa, qb, answers[i], answers[j])

    def question_bits(self) -> int:
        return 1 + max(math.ceil(math.log2(max(len(self.cnf.clauses), 2))), math.ceil(math.log2(self.cnf.n + 1)))


def clause_answer(cnf: CNF, k: int, assignment) -> int:
    clause = cnf.padded(cnf.clauses[k])
    return sum(int(bool(assignment[abs(l) - 1])) << t for t, l in enumerate(clause))


class AssignmentAnswers:
    """Honest answer function of :class:`ClauseVariableGame` from an assignment."""

    def __init__(self, cnf: CNF, assignment):
        self.cnf = cnf
        self.assignment = [int(bool(v)) for v in assignment]

    def __call__(self, question) -> int:
        if question[0] == "clause":
            return clause_answer(self.cnf, question[1], self.assignment)
        return self.assignment[question[1] - 1]


def decode_assignment(g, n: int, params: SatTestParams) -> list[bool]:
    """Z(g)_x = [g(point of x) != 0]; ``g`` is a MultiPoly or anything callable on points."""
    return [bool(int(g(variable_point(i, params)))) for i in range(1, n + 1)]


def satisfied_fraction(cnf: CNF, assignment) -> float:
    return 1 - cnf.violated_fraction(assignment)

"""Clause-checking test built on the two-level low-degree test.

Extra question tokens (beyond those of :mod:`lowdegree`):

* ``("curve_pt", key, w')``: a degree-3 curve c in F^m and a point of F^{m'},
  answered by the lifted restriction of the global polynomial to c at w'.
* ``("curve_curve", key, key')``: the curve c and a curve c' of F^{m'},
  answered by a univariate polynomial in c''s parameter.

Curves are parametrised so that c(0), c(1), c(2) are the clause's variable
points and c(3) is the random point w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegreeError, InputError
from ..field import Field, make_field
from ..gamecore import Game, Round
from ..polyalg import (
    Curve4,
    MultiPoly,
    curve_through,
    low_degree_extension_dense,
    restrict_to_curve,
    sharp_apply,
    substitute_vars,
)
from .cnf import CNF
from .common import LRU, is_poly, is_residue, ordered_players, place, restrict_evaluator_curve
from .lowdegree import HonestLowDegree, LowDegreeParams, PolyOracle, TwoLevelTest


@dataclass(frozen=True)
class SatTestParams:
    n: int
    h: int
    m: int
    d: int
    d2: int
    m2: int
    field: Field

    @property
    def q(self) -> int:
        return self.field.modulus

    def as_dict(self) -> dict:
        return {"n": self.n, "h": self.h, "m": self.m, "d": self.d, "d2": self.d2, "m2": self.m2, "q": self.q}


def sat_shape(n: int) -> tuple[int, int, int, int]:
    """(h, m, d, m') for n variables, independent of the field."""
    if n < 3:
        raise InputError("the 3-SAT test needs n >= 3")
    h = (n - 1).bit_length()  # ceil(log2 n)
    logn = math.log2(n)
    m = max(1, math.ceil(logn / math.log2(logn)))
    d = m * h
    m2 = math.ceil(math.log2(4 * d + 1))
    if (h + 1) ** m < n:
        raise InputError(f"grid {{0..{h}}}^{m} too small for {n} variables")
    return h, m, d, m2


def sat_params(n: int, field) -> SatTestParams:
    """Grid side h+1, dimension m, degree d = m*h and curve substitution size."""
    field = field if isinstance(field, Field) else make_field(int(field))
    h, m, d, m2 = sat_shape(n)
    if field.modulus < h + 1:
        raise InputError(f"field size {field.modulus} < h+1 = {h + 1}")
    return SatTestParams(n, h, m, d, m2, m2, field)


def variable_point(index: int, params: SatTestParams) -> tuple:
    """Grid point of variable ``index`` (1-based): index-1 in base h+1, little-endian."""
    if not 1 <= index <= params.n:
        raise InputError(f"variable {index} outside 1..{params.n}")
    v = index - 1
    out = []
    for _ in range(params.m):
        out.append(v % (params.h + 1))
        v //= params.h + 1
    return tuple(out)


class SatTest(Game):
    def __init__(self, cnf: CNF, r: int, field, params: SatTestParams | None = None):
        self.cnf = cnf
        self.params = params or sat_params(cnf.n, field)
        p = self.params
        if p.field.modulus < 4:
            raise DegreeError("curves through four points need |F| >= 4")
        self.r = r
        self.ld = TwoLevelTest(LowDegreeParams(p.d, p.m, r, p.field))
        self.name = f"3sat(n={cnf.n},q={p.q})"
        self.symmetric = True
        self._points = [tuple(variable_point(abs(l), p) for l in cnf.padded(c)) for c in cnf.clauses]
        self._sharp = [sharp_apply(4 * p.d, (t,), p.field) for t in range(4)]

    def sharp(self, t: int) -> tuple:
        return self._sharp[t] if 0 <= t < 4 else sharp_apply(4 * self.params.d, (t,), self.params.field)

    def sample(self, rng):
        if int(rng.integers(0, 2)) == 0:
            rnd = self.ld.sample(rng)
            return Round(rnd.questions, ("ld", rnd.context), rnd.auto_accept)
        p = self.params
        k = int(rng.integers(0, len(self.cnf.clauses)))
        w = tuple(int(v) for v in p.field.sample(rng, p.m))
        c = curve_through(list(self._points[k]) + [w], p.field)
        sub = int(rng.integers(0, 2))
        i, j = ordered_players(rng, self.r, 2)
        if sub == 0:
            qs = {i: ("pt", w), j: ("curve_pt", c.coeffs, self.sharp(3))}
        else:
            w2 = tuple(int(v) for v in p.field.sample(rng, p.m2))
            c2 = curve_through([self.sharp(0), self.sharp(1), self.sharp(2), w2], p.field)
            qs = {i: ("curve_pt", c.coeffs, w2), j: ("curve_curve", c.coeffs, c2.coeffs)}
        return Round(place(self.r, qs), ("clause", sub, k, i, j))

    def check(self, rnd, answers):
        if rnd.auto_accept:
            return True
        if rnd.context[0] == "ld":
            return self.ld.check(Round(rnd.questions, rnd.context[1]), answers)
        _, sub, k, i, j = rnd.context
        q = self.params.q
        a, b = answers[i], answers[j]
        if sub == 0:
            return is_residue(a, q) and is_residue(b, q) and a == b
        return clause_check(self.params, self.cnf.padded(self.cnf.clauses[k]), a, b)


def clause_check(params: SatTestParams, literals, a, g) -> bool:
    """Reject unless g(0..2) is a 0/1 assignment satisfying the clause and g(3) = a."""
    if not is_residue(a, params.q) or not is_poly(g, params.field, 1, 4 * params.d2):
        return False
    vals = [g(t) for t in range(3)]
    if any(v not in (0, 1) for v in vals):
        return False
    if not any((v == 1) == (lit > 0) for v, lit in zip(vals, literals)):
        return False
    return g(3) == a


class HonestSat(HonestLowDegree):
    """Answers from the low-degree extension of an assignment."""

    def __init__(self, cnf: CNF, params: SatTestParams, assignment, cache: int = 2048):
        if len(assignment) != cnf.n:
            raise InputError(f"assignment has {len(assignment)} values for {cnf.n} variables")
        p = params
        grid = np.zeros((p.h + 1,) * p.m, dtype=np.int64)
        for idx, val in enumerate(assignment, start=1):
            grid[variable_point(idx, p)] = int(bool(val))
        self.lde = low_degree_extension_dense(grid, p.h, p.m, p.field)
        super().__init__(PolyOracle(p.field, self.lde.evaluate_many, p.d, p.m), p.d, cache)
        self.params = p
        self._curve = LRU(cache)

    def lifted_curve(self, key) -> MultiPoly:
        def make():
            c = Curve4(self.params.field, key)
            on_c = restrict_evaluator_curve(self.oracle.evaluate_many, c, self.params.d)
            return substitute_vars(on_c, 4 * self.params.d)

        return self._curve.get(key, make)

    def answer(self, question):
        kind = question[0]
        if kind == "curve_pt":
            return self.lifted_curve(question[1])(question[2])
        if kind == "curve_curve":
            return restrict_to_curve(self.lifted_curve(question[1]), Curve4(self.params.field, question[2]))
        return super().answer(question)


def honest_sat_strategy(cnf: CNF, assignment, field=None, params: SatTestParams | None = None) -> HonestSat:
    params = params or sat_params(cnf.n, field)
    return HonestSat(cnf, params, assignment)


def expected_rejection(cnf: CNF, assignment) -> float:
    """Rejection rate of the honest-style strategy: half clause branch, half curve sub-test."""
    return cnf.violated_fraction(assignment) / 4

"""Plane-vs-point low-degree test and its two-level (answer-reduced) variant.

Question tokens:

* ``("pt", x)``: a point of F^m, answered by a residue.
* ``("plane", key)``: a canonical plane of F^m, answered by a bivariate
  polynomial in the plane's canonical coordinates.
* ``("plane_pt", key, x')``: a plane s together with a point of F^{m'},
  answered by a residue (the lifted restriction evaluated at x').
* ``("plane_plane", key, key')``: a plane s of F^m and a plane s' of F^{m'},
  answered by a bivariate polynomial on s'.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from ..errors import DegreeError, InputError
from ..field import Field, make_field
from ..gamecore import Game, Round, Strategy
from ..polyalg import (
    AffineSubspace,
    MultiPoly,
    canonical_base,
    enumerate_linear_subspaces,
    gaussian_binomial,
    independent_probability,
    restrict_to_subspace,
    sharp_apply,
    sharp_bits,
    subspace_from_draw,
    substitute_vars,
)
from .common import LRU, is_poly, is_residue, ordered_players, place, player_tuples, restrict_evaluator


def _field(f) -> Field:
    return f if isinstance(f, Field) else make_field(int(f))


@dataclass(frozen=True)
class LowDegreeParams:
    d: int
    m: int
    r: int
    field: Field

    def __post_init__(self):
        object.__setattr__(self, "field", _field(self.field))
        if self.m < 2:
            raise InputError("the plane test needs m >= 2")
        if self.r < 2:
            raise InputError("at least two players are required")
        if self.d < 0:
            raise InputError("degree must be non-negative")

    @property
    def q(self) -> int:
        return self.field.modulus

    @property
    def t(self) -> int:
        return sharp_bits(self.d)

    @property
    def m2(self) -> int:
        """Dimension m' of the second-level space (two source coordinates)."""
        return 2 * self.t

    @property
    def d2(self) -> int:
        return 2 * self.t

    @property
    def soundness_regime(self) -> bool:
        """Whether r meets the player count the soundness analysis assumes."""
        return self.r >= 3

    def as_dict(self) -> dict:
        return {"d": self.d, "m": self.m, "r": self.r, "q": self.q, "d2": self.d2, "m2": self.m2}


def _draw_plane(field, m, rng):
    x = tuple(int(v) for v in field.sample(rng, m))
    y1 = tuple(int(v) for v in field.sample(rng, m))
    y2 = tuple(int(v) for v in field.sample(rng, m))
    return x, (y1, y2)


def all_planes(field: Field, m: int):
    """Every affine plane of F^m in canonical form."""
    q = field.modulus
    for dirs in enumerate_linear_subspaces(field, m, 2):
        piv = {next(j for j, v in enumerate(y) if v) for y in dirs}
        free = [j for j in range(m) if j not in piv]
        for vals in itertools.product(range(q), repeat=len(free)):
            base = [0] * m
            for j, v in zip(free, vals):
                base[j] = v
            yield AffineSubspace(field, tuple(base), dirs, True)


def plane_count(q: int, m: int) -> int:
    return gaussian_binomial(m, 2, q) * q ** (m - 2)


def _auto_round(r: int, tag: str) -> Round:
    return Round((None,) * r, context=(tag,), auto_accept=True)


# ---------------------------------------------------------------------------
# plane-vs-point


class PlanePointTest(Game):
    def __init__(self, params: LowDegreeParams):
        self.params = params
        self.r = params.r
        self.name = f"plane-point(d={params.d},m={params.m},q={params.q})"
        self.symmetric = True

    def round_from_draw(self, x, dirs, players) -> Round:
        draw = subspace_from_draw(self.params.field, x, dirs)
        if draw.dependent:
            return _auto_round(self.r, "dependent")
        i, j = players
        return Round(place(self.r, {i: ("plane", draw.subspace.key), j: ("pt", tuple(x))}), context=(i, j))

    def sample(self, rng):
        x, dirs = _draw_plane(self.params.field, self.params.m, rng)
        return self.round_from_draw(x, dirs, ordered_players(rng, self.r, 2))

    def check(self, rnd, answers):
        if rnd.auto_accept:
            return True
        i, j = rnd.context
        p = self.params
        s = AffineSubspace.from_key(p.field, rnd.questions[i][1])
        x = rnd.questions[j][1]
        return ld_check(answers[i], answers[j], s, x, p.d)

    def rounds(self):
        p = self.params
        q, m = p.q, p.m
        pind = independent_probability(m, 2, q)
        pairs = player_tuples(self.r, 2)
        w = pind / (plane_count(q, m) * q * q * len(pairs))
        out = []
        if pind != 1:
            out.append((_auto_round(self.r, "dependent"), 1 - pind))
        for s in all_planes(p.field, m):
            for alpha in itertools.product(range(q), repeat=2):
                x = s.point(alpha)
                for i, j in pairs:
                    out.append((Round(place(self.r, {i: ("plane", s.key), j: ("pt", x)}), context=(i, j)), w))
        return out


def ld_check(g, a, s: AffineSubspace, x, d: int) -> bool:
    """Accept iff g is a bivariate degree-<=d polynomial on s with g(x) = a."""
    field = s.field
    if not is_poly(g, field, 2, d) or not is_residue(a, field.modulus):
        return False
    alpha = s.coords_of(x)
    if alpha is None:
        return False
    return g(alpha) == a


# ---------------------------------------------------------------------------
# two-level


class TwoLevelTest(Game):
    def __init__(self, params: LowDegreeParams):
        self.params = params
        self.r = params.r
        self.name = f"two-level(d={params.d},m={params.m},q={params.q})"
        self.symmetric = True

    def sharp(self, alpha) -> tuple:
        return sharp_apply(self.params.d, alpha, self.params.field)

    def round_from_draw(self, x, dirs, x2, dirs2, players, branch) -> Round:
        f = self.params.field
        d1 = subspace_from_draw(f, x, dirs)
        d2 = subspace_from_draw(f, x2, dirs2)
        if d1.dependent or d2.dependent:
            return _auto_round(self.r, "dependent")
        s, s2 = d1.subspace, d2.subspace
        i, j = players
        if branch == 0:
            alpha = s.coords_of(x)
            qs = {i: ("pt", tuple(x)), j: ("plane_pt", s.key, self.sharp(alpha))}
        else:
            qs = {i: ("plane_plane", s.key, s2.key), j: ("plane_pt", s.key, tuple(x2))}
        return Round(place(self.r, qs), context=(branch, i, j))

    def sample(self, rng):
        p = self.params
        x, dirs = _draw_plane(p.field, p.m, rng)
        x2, dirs2 = _draw_plane(p.field, p.m2, rng)
        players = ordered_players(rng, self.r, 2)
        branch = int(rng.integers(0, 2))
        return self.round_from_draw(x, dirs, x2, dirs2, players, branch)

    def check(self, rnd, answers):
        if rnd.auto_accept:
            return True
        branch, i, j = rnd.context
        return twolevel_check(self.params, branch, rnd.questions[i], rnd.questions[j], answers[i], answers[j])

    def rounds(self):
        p = self.params
        q, m, m2 = p.q, p.m, p.m2
        pind = independent_probability(m, 2, q) * independent_probability(m2, 2, q)
        pairs = player_tuples(self.r, 2)
        n1, n2 = plane_count(q, m), plane_count(q, m2)
        out = []
        if pind != 1:
            out.append((_auto_round(self.r, "dependent"), 1 - pind))
        w1 = pind / 2 / (n1 * q * q * len(pairs))
        w2 = pind / 2 / (n1 * n2 * q * q * len(pairs))
        planes2 = list(all_planes(p.field, m2))
        for s in all_planes(p.field, m):
            for alpha in itertools.product(range(q), repeat=2):
                x = s.point(alpha)
                for i, j in pairs:
                    qs = {i: ("pt", x), j: ("plane_pt", s.key, self.sharp(alpha))}
                    out.append((Round(place(self.r, qs), context=(0, i, j)), w1))
            for s2 in planes2:
                for alpha in itertools.product(range(q), repeat=2):
                    x2 = s2.point(alpha)
                    for i, j in pairs:
                        qs = {i: ("plane_plane", s.key, s2.key), j: ("plane_pt", s.key, x2)}
                        out.append((Round(place(self.r, qs), context=(1, i, j)), w2))
        return out


def twolevel_check(params: LowDegreeParams, branch: int, q1, q2, a1, a2) -> bool:
    """Checks of the two sub-tests: equal values, or g'(x') = a' on s'."""
    field = params.field
    if branch == 0:
        return is_residue(a1, field.modulus) and is_residue(a2, field.modulus) and a1 == a2
    s2 = AffineSubspace.from_key(field, q1[2])
    return ld_check(a1, a2, s2, q2[2], params.d2)


# ---------------------------------------------------------------------------
# honest strategies


class PolyOracle:
    """Batch evaluator for a global polynomial of total degree at most ``degree``."""

    def __init__(self, field: Field, evaluate_many: Callable, degree: int, nvars: int):
        self.field = field
        self.evaluate_many = evaluate_many
        self.degree = degree
        self.nvars = nvars

    @classmethod
    def from_poly(cls, poly: MultiPoly, degree: int | None = None) -> "PolyOracle":
        deg = poly.total_degree if degree is None else degree
        if poly.total_degree > deg:
            raise DegreeError(f"total degree {poly.total_degree} exceeds {deg}")
        return cls(poly.field, poly.evaluate_many, max(deg, 0), poly.nvars)

    def value(self, x) -> int:
        return int(self.evaluate_many(np.array([x], dtype=np.int64))[0])

    def on_plane(self, s: AffineSubspace) -> MultiPoly:
        return restrict_evaluator(self.evaluate_many, s, self.degree)


class HonestLowDegree(Strategy):
    """Answers every low-degree query type from one global polynomial.

    The same answer function serves plane-vs-point, two-level and (through
    the curve queries in the 3-SAT module) the clause checks, so a single
    instance covers every question a composed test can ask.
    """

    def __init__(self, oracle: PolyOracle, d: int, cache: int = 2048):
        self.oracle = oracle
        self.d = d
        self._plane = LRU(cache)
        self._lift = LRU(cache)

    def plane_poly(self, key) -> MultiPoly:
        return self._plane.get(
            key, lambda: self.oracle.on_plane(AffineSubspace.from_key(self.oracle.field, key))
        )

    def lifted(self, key) -> MultiPoly:
        return self._lift.get(key, lambda: substitute_vars(self.plane_poly(key), self.d))

    def answer(self, question):
        kind = question[0]
        if kind == "pt":
            return self.oracle.value(question[1])
        if kind == "plane":
            return self.plane_poly(question[1])
        if kind == "plane_pt":
            return self.lifted(question[1])(question[2])
        if kind == "plane_plane":
            s2 = AffineSubspace.from_key(self.oracle.field, question[2])
            return restrict_to_subspace(self.lifted(question[1]), s2)
        raise InputError(f"unknown question kind {kind!r}")

    def respond(self, rnd, rng=None):
        return tuple(None if q is None else self.answer(q) for q in rnd.questions)


def honest_ld_strategy(poly: MultiPoly, d: int) -> HonestLowDegree:
    if poly.total_degree > d:
        raise DegreeError(f"global polynomial has degree {poly.total_degree} > {d}")
    return HonestLowDegree(PolyOracle.from_poly(poly, d), d)


def plane_sample_marginal(params: LowDegreeParams) -> dict:
    """Exact marginal of the point question over F^m (exhaustive over draws)."""
    q, m = params.q, params.m
    counts: dict = {}
    total = 0
    f = params.field
    for x in itertools.product(range(q), repeat=m):
        for y1 in itertools.product(range(q), repeat=m):
            for y2 in itertools.product(range(q), repeat=m):
                total += 1
                if subspace_from_draw(f, x, (y1, y2)).dependent:
                    continue
                counts[x] = counts.get(x, 0) + 1
    return {x: Fraction(c, total) for x, c in counts.items()}


__all__ = [
    "LowDegreeParams",
    "PlanePointTest",
    "TwoLevelTest",
    "ld_check",
    "twolevel_check",
    "PolyOracle",
    "HonestLowDegree",
    "honest_ld_strategy",
    "all_planes",
    "plane_count",
    "canonical_base",
]

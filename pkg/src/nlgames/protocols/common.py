"""Shared pieces of the referee protocols."""

from __future__ import annotations

import itertools
from collections import OrderedDict
from typing import Callable

import numpy as np

from ..errors import DegreeError
from ..polyalg import (
    AffineSubspace,
    Curve4,
    MultiPoly,
    interpolation_matrix,
    matmul_mod,
    poly_from_tensor,
    tensor_interpolate,
)


def ordered_players(rng: np.random.Generator, r: int, k: int) -> tuple:
    """k distinct players, uniformly random and ordered."""
    return tuple(int(i) for i in rng.permutation(r)[:k])


def place(r: int, assignments: dict) -> tuple:
    """Question tuple with ``assignments[i]`` at player i and None elsewhere."""
    return tuple(assignments.get(i) for i in range(r))


def player_tuples(r: int, k: int):
    return list(itertools.permutations(range(r), k))


def is_residue(a, q: int) -> bool:
    return isinstance(a, (int, np.integer)) and not isinstance(a, bool) and 0 <= a < q


def is_poly(g, field, nvars: int, max_degree: int) -> bool:
    return (
        isinstance(g, MultiPoly)
        and g.field == field
        and g.nvars == nvars
        and g.total_degree <= max_degree
    )


def restrict_evaluator(evalf: Callable, s: AffineSubspace, degree: int) -> MultiPoly:
    """Restriction to ``s`` of a function known only through batch evaluation.

    ``degree`` bounds the total degree of the function; the restriction is
    recovered from its values on the grid {0..degree}^dim.
    """
    field = s.field
    if degree >= field.modulus:
        raise DegreeError(f"degree {degree} needs a field larger than {field.modulus}")
    k = s.dim
    grid = np.array(list(itertools.product(range(degree + 1), repeat=k)), dtype=np.int64)
    vals = np.asarray(evalf(s.points_many(grid))).reshape((degree + 1,) * k)
    return poly_from_tensor(field, tensor_interpolate(field, vals), degree)


def restrict_evaluator_curve(evalf: Callable, c: Curve4, degree: int) -> MultiPoly:
    """Univariate restriction to curve ``c`` of a total-degree-``degree`` function."""
    field = c.field
    bound = degree * max(c.degree, 1)
    if bound >= field.modulus:
        raise DegreeError(f"curve restriction degree {bound} needs a larger field")
    ts = np.arange(bound + 1)
    vals = np.asarray(evalf(c.points_many(ts))).reshape(-1, 1)
    coeffs = matmul_mod(interpolation_matrix(field, bound + 1), vals, field.modulus).reshape(-1)
    return MultiPoly.univariate(field, [int(x) for x in coeffs])


class LRU:
    """Tiny bounded cache used by honest strategies (answers are pure functions)."""

    def __init__(self, size: int = 4096):
        self.size = size
        self.data: OrderedDict = OrderedDict()

    def get(self, key, make):
        try:
            self.data.move_to_end(key)
            return self.data[key]
        except KeyError:
            val = make()
            self.data[key] = val
            if len(self.data) > self.size:
                self.data.popitem(last=False)
            return val

    def __getstate__(self):
        return {"size": self.size}

    def __setstate__(self, state):
        self.size = state["size"]
        self.data = OrderedDict()

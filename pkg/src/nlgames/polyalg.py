"""Multivariate polynomials over F_p and the affine geometry used by the tests.

Coefficients and points are plain residues (``int``) internally.  A
:class:`MultiPoly` is an immutable sparse map from exponent tuples to nonzero
coefficients.  :class:`DensePoly` is a coefficient tensor used where many
evaluations of one polynomial are needed (honest strategies).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegreeError, DimensionMismatch, FieldMismatch, InputError, TooLarge
from .field import Field, FieldElem, inv_matrix_mod, make_field, matmul_mod, vec_ok

ENUM_CAP = 10**6


def _as_field(field) -> Field:
    return field if isinstance(field, Field) else make_field(int(field))


def _int_dtype(p: int):
    return np.int64 if vec_ok(p) else object


def _residues(point, p: int) -> tuple:
    return tuple(int(x) % p for x in point)


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables over a prime field."""

    __slots__ = ("field", "nvars", "terms", "_degree", "_hash", "_indiv")

    def __init__(self, field, nvars: int, terms: Mapping | None = None):
        field = _as_field(field)
        p = field.modulus
        acc: dict[tuple, int] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise DimensionMismatch(f"exponent {e} has length {len(e)}, expected {nvars}")
            if any(x < 0 for x in e):
                raise InputError(f"negative exponent in {e}")
            acc[e] = (acc.get(e, 0) + int(c)) % p
        self._init(field, nvars, {e: c for e, c in acc.items() if c})

    def _init(self, field, nvars, terms):
        self.field = field
        self.nvars = int(nvars)
        self.terms = terms
        self._degree = None
        self._hash = None
        self._indiv = None

    @classmethod
    def _raw(cls, field, nvars, terms) -> "MultiPoly":
        # trusted constructor: reduced, nonzero coefficients
        obj = cls.__new__(cls)
        obj._init(field, nvars, terms)
        return obj

    # ---- constructors
    @classmethod
    def zero(cls, field, nvars: int) -> "MultiPoly":
        return cls._raw(_as_field(field), nvars, {})

    @classmethod
    def constant(cls, field, nvars: int, c: int) -> "MultiPoly":
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, field, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(field, nvars, {tuple(e): 1})

    @classmethod
    def univariate(cls, field, coeffs: Sequence[int]) -> "MultiPoly":
        return cls(field, 1, {(k,): c for k, c in enumerate(coeffs)})

    # ---- basic properties
    @property
    def modulus(self) -> int:
        return self.field.modulus

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        """Maximum exponent sum; -1 for the zero polynomial."""
        if self._degree is None:
            self._degree = max((sum(e) for e in self.terms), default=-1)
        return self._degree

    def degree_in(self, i: int) -> int:
        return self.individual_degrees()[i]

    def individual_degrees(self) -> tuple:
        if self._indiv is None:
            if not self.terms:
                self._indiv = (-1,) * self.nvars
            else:
                self._indiv = tuple(map(max, zip(*self.terms)))
        return self._indiv

    def coefficient(self, exponent) -> int:
        return self.terms.get(tuple(exponent), 0)

    def univariate_coeffs(self) -> list[int]:
        if self.nvars != 1:
            raise DimensionMismatch("not a univariate polynomial")
        out = [0] * (self.total_degree + 1)
        for (k,), c in self.terms.items():
            out[k] = c
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (
            self.field == other.field
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.modulus, self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        if not self.terms:
            return f"MultiPoly(0 over F{self.modulus}, {self.nvars} vars)"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), e)):
            mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k)
            c = self.terms[e]
            parts.append(f"{c}*{mono}" if mono else str(c))
        return f"MultiPoly({' + '.join(parts)} over F{self.modulus})"

    # ---- arithmetic
    def _check(self, other: "MultiPoly"):
        if other.field != self.field:
            raise FieldMismatch(f"F{self.modulus} vs F{other.modulus}")
        if other.nvars != self.nvars:
            raise DimensionMismatch(f"{self.nvars} vs {other.nvars} variables")

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldMismatch(f"F{self.modulus} vs {other.field!r}")
            other = other.residue
        if isinstance(other, (int, np.integer)):
            return MultiPoly.constant(self.field, self.nvars, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        p = self.modulus
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.field, self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.modulus
        return MultiPoly._raw(self.field, self.nvars, {e: (-c) % p for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c: int) -> "MultiPoly":
        p = self.modulus
        c %= p
        if c == 0:
            return MultiPoly.zero(self.field, self.nvars)
        return MultiPoly._raw(self.field, self.nvars, {e: v * c % p for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        other = self._lift(other)
        if other is NotImplemented:
            return other
        p = self.modulus
        out: dict[tuple, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return MultiPoly._raw(self.field, self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise InputError("negative power of a polynomial")
        result = MultiPoly.constant(self.field, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # ---- evaluation
    def __call__(self, point) -> int:
        """Value at ``point`` as a residue (a bare scalar is accepted when univariate)."""
        if isinstance(point, (int, np.integer, FieldElem)):
            point = (int(point),)
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point of length {len(point)} for {self.nvars} variables")
        p = self.modulus
        pt = _residues(point, p)
        # power tables up to the largest exponent used per variable
        tables = []
        tops = self.individual_degrees()
        for i, x in enumerate(pt):
            top = tops[i]
            row = [1] * (max(top, 0) + 1)
            for k in range(1, top + 1):
                row[k] = row[k - 1] * x % p
            tables.append(row)
        total = 0
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k:
                    v = v * tables[i][k] % p
            total += v
        return total % p

    def evaluate_many(self, points) -> np.ndarray:
        """Vectorised evaluation at the rows of an ``(N, nvars)`` array."""
        p = self.modulus
        dtype = _int_dtype(p)
        pts = np.asarray(points, dtype=dtype).reshape(-1, self.nvars) % p
        n = pts.shape[0]
        if not self.terms:
            return np.zeros(n, dtype=dtype)
        exps = np.array(list(self.terms.keys()), dtype=np.int64).reshape(-1, self.nvars)
        coeffs = np.array(list(self.terms.values()), dtype=dtype)
        vals = np.ones((n, exps.shape[0]), dtype=dtype)
        for j in range(self.nvars):
            top = int(exps[:, j].max())
            if top == 0:
                continue
            table = np.ones((n, top + 1), dtype=dtype)
            for k in range(1, top + 1):
                table[:, k] = table[:, k - 1] * pts[:, j] % p
            vals = vals * table[:, exps[:, j]] % p
        return matmul_mod(vals, coeffs.reshape(-1, 1), p).reshape(-1)

    # ---- composition
    def compose(self, subs: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute ``subs[i]`` for variable i (all subs share one variable count)."""
        if len(subs) != self.nvars:
            raise DimensionMismatch(f"{len(subs)} substitutions for {self.nvars} variables")
        if not subs:
            return self
        k = subs[0].nvars
        for s in subs:
            if s.field != self.field:
                raise FieldMismatch("substitution over a different field")
            if s.nvars != k:
                raise DimensionMismatch("substitutions disagree on variable count")
        powers = [[MultiPoly.constant(self.field, k, 1)] for _ in subs]
        for i, s in enumerate(subs):
            for _ in range(self.degree_in(i)):
                powers[i].append(powers[i][-1] * s)
        out = MultiPoly.zero(self.field, k)
        for e, c in self.terms.items():
            term = MultiPoly.constant(self.field, k, c)
            for i, d in enumerate(e):
                if d:
                    term = term * powers[i][d]
            out = out + term
        return out

    # ---- text format
    def to_text(self) -> str:
        lines = [f"p {self.modulus} m {self.nvars}"]
        for e in sorted(self.terms):
            lines.append(" ".join([str(self.terms[e])] + [str(x) for x in e]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MultiPoly":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows or len(rows[0]) != 4 or rows[0][0] != "p" or rows[0][2] != "m":
            raise InputError("polynomial text must start with 'p <modulus> m <vars>'")
        try:
            p, m = int(rows[0][1]), int(rows[0][3])
            terms: dict[tuple, int] = {}
            for row in rows[1:]:
                if len(row) != m + 1:
                    raise InputError(f"term line {' '.join(row)!r} needs {m + 1} fields")
                e = tuple(int(x) for x in row[1:])
                if e in terms:
                    raise InputError(f"duplicate exponent {e}")
                terms[e] = int(row[0])
        except ValueError as exc:
            raise InputError(f"bad polynomial text: {exc}") from exc
        return cls(make_field(p), m, terms)


def evaluate(poly: MultiPoly, point) -> FieldElem:
    return FieldElem(poly(point), poly.field)


def evaluate_many(poly: MultiPoly, points) -> np.ndarray:
    return poly.evaluate_many(points)


# ---------------------------------------------------------------------------
# interpolation


@lru_cache(maxsize=256)
def _inverse_vandermonde(p: int, nodes: tuple) -> np.ndarray:
    n = len(nodes)
    if len(set(x % p for x in nodes)) != n:
        raise InputError("interpolation nodes must be distinct field elements")
    vand = np.array([[pow(x, k, p) for k in range(n)] for x in nodes], dtype=object)
    inv = inv_matrix_mod(vand, p)
    inv.setflags(write=False)
    return inv


def interpolation_matrix(field, npoints: int) -> np.ndarray:
    """Matrix mapping values at 0..npoints-1 to monomial coefficients."""
    field = _as_field(field)
    if npoints > field.modulus:
        raise DegreeError(f"need {npoints} distinct nodes but |F| = {field.modulus}")
    return _grid_inverse(field.modulus, npoints)


@lru_cache(maxsize=256)
def _grid_inverse(p: int, npoints: int) -> np.ndarray:
    inv = _inverse_vandermonde(p, tuple(range(npoints)))
    if vec_ok(p):
        inv = inv.astype(np.int64)
        inv.setflags(write=False)
    return inv


def interpolate_univariate(field, xs: Sequence[int], ys: Sequence[int]) -> MultiPoly:
    field = _as_field(field)
    p = field.modulus
    inv = _inverse_vandermonde(p, tuple(int(x) % p for x in xs))
    vals = np.array([int(y) % p for y in ys], dtype=_int_dtype(p)).reshape(-1, 1)
    coeffs = matmul_mod(inv, vals, p).reshape(-1)
    return MultiPoly.univariate(field, [int(c) for c in coeffs])


def tensor_interpolate(field, values: np.ndarray) -> np.ndarray:
    """Coefficient tensor of the polynomial with per-axis degree < shape[j]
    taking ``values`` on the grid ``{0..shape[0]-1} x ...``."""
    field = _as_field(field)
    p = field.modulus
    coeffs = np.asarray(values, dtype=_int_dtype(p)) % p
    for axis, size in enumerate(coeffs.shape):
        inv = interpolation_matrix(field, size)
        moved = np.moveaxis(coeffs, axis, 0)
        shape = moved.shape
        flat = matmul_mod(inv, moved.reshape(size, -1), p)
        coeffs = np.moveaxis(flat.reshape(shape), 0, axis)
    return np.ascontiguousarray(coeffs)


def poly_from_tensor(field, coeffs: np.ndarray, max_total: int | None = None) -> MultiPoly:
    field = _as_field(field)
    idx = np.argwhere(coeffs)
    if max_total is not None and idx.size:
        idx = idx[idx.sum(axis=1) <= max_total]
    vals = coeffs[tuple(idx.T)] if idx.size else []
    terms = dict(zip(map(tuple, idx.tolist()), [int(v) for v in vals]))
    return MultiPoly._raw(field, coeffs.ndim, terms)


class DensePoly:
    """Polynomial stored as a coefficient tensor; ``coeffs[e]`` multiplies x^e."""

    def __init__(self, field, coeffs: np.ndarray):
        self.field = _as_field(field)
        p = self.field.modulus
        self.coeffs = np.asarray(coeffs, dtype=_int_dtype(p)) % p
        self.nvars = self.coeffs.ndim

    @classmethod
    def from_multipoly(cls, poly: MultiPoly) -> "DensePoly":
        shape = tuple(max(d, 0) + 1 for d in poly.individual_degrees())
        c = np.zeros(shape, dtype=_int_dtype(poly.modulus))
        for e, v in poly.terms.items():
            c[e] = v
        return cls(poly.field, c)

    def to_multipoly(self) -> MultiPoly:
        return poly_from_tensor(self.field, self.coeffs)

    def evaluate_many(self, points) -> np.ndarray:
        p = self.field.modulus
        dtype = _int_dtype(p)
        pts = np.asarray(points, dtype=dtype).reshape(-1, self.nvars) % p
        n = pts.shape[0]
        tables = []
        for j in range(self.nvars):
            size = self.coeffs.shape[j]
            table = np.ones((n, size), dtype=dtype)
            for k in range(1, size):
                table[:, k] = table[:, k - 1] * pts[:, j] % p
            tables.append(table)
        if self.nvars == 0:
            return np.full(n, self.coeffs[()], dtype=dtype)
        # contract the first axis with one matmul, the rest point by point
        first = self.coeffs.shape[0]
        acc = matmul_mod(tables[0], self.coeffs.reshape(first, -1), p)
        for j in range(1, self.nvars):
            size = self.coeffs.shape[j]
            acc = acc.reshape(n, size, -1)
            acc = (acc * tables[j][:, :, None] % p).sum(axis=1) % p
        return acc.reshape(n)

    def __call__(self, point) -> int:
        return int(self.evaluate_many([point])[0])


# ---------------------------------------------------------------------------
# low-degree extension


def low_degree_extension(values, h: int, m: int, field) -> MultiPoly:
    """Unique polynomial with individual degrees <= h matching ``values`` on {0..h}^m.

    ``values`` is a mapping from grid tuples to residues or an array of shape
    ``(h+1,)*m``.
    """
    return low_degree_extension_dense(values, h, m, field).to_multipoly()


def low_degree_extension_dense(values, h: int, m: int, field) -> DensePoly:
    field = _as_field(field)
    if h + 1 > field.modulus:
        raise DegreeError(f"grid {{0..{h}}} does not fit in F{field.modulus}")
    shape = (h + 1,) * m
    if isinstance(values, Mapping):
        grid = np.zeros(shape, dtype=_int_dtype(field.modulus))
        seen = 0
        for key, v in values.items():
            key = tuple(int(k) for k in key)
            if len(key) != m or any(not 0 <= k <= h for k in key):
                raise InputError(f"grid point {key} outside {{0..{h}}}^{m}")
            grid[key] = int(v) % field.modulus
            seen += 1
        if seen != (h + 1) ** m:
            raise InputError(f"grid incomplete: {seen} of {(h + 1) ** m} points assigned")
    else:
        grid = np.asarray(values)
        if grid.shape != shape:
            raise InputError(f"value array has shape {grid.shape}, expected {shape}")
    return DensePoly(field, tensor_interpolate(field, grid))


# ---------------------------------------------------------------------------
# variable substitution (the "#" map)


def sharp_bits(d: int) -> int:
    """Number of power-of-two variables per source coordinate for degree d."""
    return max(1, math.ceil(math.log2(d + 1)))


def sharp_apply(d: int, point, field) -> tuple:
    """Map (x_1..x_k) to (x_1^{2^0}..x_1^{2^{t-1}}, ..., x_k^{2^0}..x_k^{2^{t-1}})."""
    p = _as_field(field).modulus
    t = sharp_bits(d)
    out = []
    for x in point:
        v = int(x) % p
        for _ in range(t):
            out.append(v)
            v = v * v % p
    return tuple(out)


def sharp_apply_many(d: int, points: np.ndarray, field) -> np.ndarray:
    p = _as_field(field).modulus
    pts = np.asarray(points, dtype=_int_dtype(p)) % p
    t = sharp_bits(d)
    cols = []
    for j in range(pts.shape[1]):
        v = pts[:, j]
        for _ in range(t):
            cols.append(v)
            v = v * v % p
    return np.stack(cols, axis=1)


@lru_cache(maxsize=64)
def _bit_table(d: int, t: int) -> list:
    return [tuple((k >> i) & 1 for i in range(t)) for k in range(d + 1)]


def substitute_vars(g: MultiPoly, d: int) -> MultiPoly:
    """Multilinear g' in k*t variables with g'(sharp_apply(d, P)) = g(P).

    Each variable's degree must be at most d (the total degree may exceed it).
    """
    if any(k > d for k in g.individual_degrees()):
        raise DegreeError(f"individual degrees {g.individual_degrees()} exceed {d}")
    t = sharp_bits(d)
    table = _bit_table(d, t)
    terms = {}
    for e, c in g.terms.items():
        bits = ()
        for k in e:
            bits += table[k]
        terms[bits] = c
    return MultiPoly._raw(g.field, g.nvars * t, terms)


# ---------------------------------------------------------------------------
# affine subspaces


def rref(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row-echelon form mod p; returns (nonzero rows, pivot columns)."""
    mat = [[int(x) % p for x in row] for row in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][col], p - 2, p)
        mat[r] = [x * inv % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank_mod(rows, p: int) -> int:
    return len(rref(rows, p)[1]) if len(rows) else 0


@dataclass(frozen=True)
class AffineSubspace:
    """The point set {base + sum_i alpha_i directions[i]}."""

    field: Field
    base: tuple
    directions: tuple
    canonical: bool = False

    def __post_init__(self):
        p = self.field.modulus
        base = _residues(self.base, p)
        dirs = tuple(_residues(y, p) for y in self.directions)
        if any(len(y) != len(base) for y in dirs):
            raise DimensionMismatch("direction length differs from base point length")
        if dirs and rank_mod(dirs, p) != len(dirs):
            raise InputError("directions are not linearly independent")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "directions", dirs)

    @property
    def dim(self) -> int:
        return len(self.directions)

    @property
    def ambient(self) -> int:
        return len(self.base)

    @property
    def key(self) -> tuple:
        return (self.base, self.directions)

    @classmethod
    def from_key(cls, field, key, canonical: bool = True) -> "AffineSubspace":
        base, dirs = key
        return cls(_as_field(field), tuple(base), tuple(tuple(y) for y in dirs), canonical)

    def pivots(self) -> list[int]:
        # pivot column of each canonical direction row
        return [next(j for j, x in enumerate(y) if x) for y in self.directions]

    def canonicalize(self) -> "AffineSubspace":
        if self.canonical:
            return self
        p = self.field.modulus
        rows, piv = rref(self.directions, p) if self.directions else ([], [])
        base = list(self.base)
        for row, c in zip(rows, piv):
            f = base[c]
            if f:
                base = [(b - f * y) % p for b, y in zip(base, row)]
        return AffineSubspace(self.field, tuple(base), tuple(tuple(r) for r in rows), True)

    def point(self, alpha) -> tuple:
        if len(alpha) != self.dim:
            raise DimensionMismatch(f"{len(alpha)} coordinates for a {self.dim}-dim subspace")
        p = self.field.modulus
        out = list(self.base)
        for a, y in zip(alpha, self.directions):
            a = int(a) % p
            if a:
                out = [(o + a * v) % p for o, v in zip(out, y)]
        return tuple(out)

    def points_many(self, alphas: np.ndarray) -> np.ndarray:
        p = self.field.modulus
        dtype = _int_dtype(p)
        al = np.asarray(alphas, dtype=dtype).reshape(-1, self.dim) % p
        out = np.broadcast_to(np.array(self.base, dtype=dtype), (al.shape[0], self.ambient)).copy()
        for i, y in enumerate(self.directions):
            out = (out + al[:, i : i + 1] * np.array(y, dtype=dtype)) % p
        return out

    def coords_of(self, point) -> tuple | None:
        """Coordinates of ``point`` in the canonical frame, or None if outside."""
        s = self.canonicalize()
        p = self.field.modulus
        diff = [(int(x) - b) % p for x, b in zip(point, s.base)]
        alpha = tuple(diff[c] for c in s.pivots())
        return alpha if s.point(alpha) == _residues(point, p) else None

    def contains(self, point) -> bool:
        return self.coords_of(point) is not None

    def same_set(self, other: "AffineSubspace") -> bool:
        return self.canonicalize().key == other.canonicalize().key

    def __iter__(self):
        return iter(enumerate_points(self))


def enumerate_points(s: AffineSubspace, cap: int = ENUM_CAP) -> list[tuple]:
    q = s.field.modulus
    if q**s.dim > cap:
        raise TooLarge(f"{q}^{s.dim} points exceed enumeration cap {cap}")
    return [s.point(a) for a in itertools.product(range(q), repeat=s.dim)]


@dataclass(frozen=True)
class SubspaceDraw:
    base: tuple
    directions: tuple
    dependent: bool
    subspace: AffineSubspace | None


def sample_subspace(field, m: int, k: int, rng: np.random.Generator) -> SubspaceDraw:
    """Uniform base point and k uniform directions; flags a dependent draw."""
    field = _as_field(field)
    if k > m:
        raise DimensionMismatch(f"cannot fit {k} independent directions in F^{m}")
    base = tuple(int(x) for x in field.sample(rng, m))
    dirs = tuple(tuple(int(x) for x in field.sample(rng, m)) for _ in range(k))
    return subspace_from_draw(field, base, dirs)


def subspace_from_draw(field, base, dirs) -> SubspaceDraw:
    field = _as_field(field)
    dependent = bool(dirs) and rank_mod(dirs, field.modulus) < len(dirs)
    sub = None if dependent else AffineSubspace(field, base, dirs).canonicalize()
    return SubspaceDraw(tuple(base), tuple(dirs), dependent, sub)


def gaussian_binomial(m: int, k: int, q: int) -> int:
    """Number of k-dimensional linear subspaces of F_q^m."""
    num = den = 1
    for i in range(k):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def independent_probability(m: int, k: int, q: int) -> Fraction:
    """Probability that k uniform vectors of F_q^m are linearly independent."""
    prob = Fraction(1)
    for i in range(k):
        prob *= Fraction(q**m - q**i, q**m)
    return prob


def enumerate_linear_subspaces(field, m: int, k: int, cap: int = ENUM_CAP):
    """Yield every k-dim linear subspace of F^m as canonical (RREF) direction rows."""
    field = _as_field(field)
    q = field.modulus
    if gaussian_binomial(m, k, q) > cap:
        raise TooLarge(f"too many {k}-dim subspaces of F_{q}^{m}")
    for piv in itertools.combinations(range(m), k):
        free = [(i, j) for i, c in enumerate(piv) for j in range(c + 1, m) if j not in piv]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * m for _ in range(k)]
            for i, c in enumerate(piv):
                rows[i][c] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            yield tuple(tuple(r) for r in rows)


def canonical_base(field, base, dirs) -> tuple:
    """Base point reduced against canonical directions (zero at pivot columns)."""
    p = _as_field(field).modulus
    out = [int(x) % p for x in base]
    for y in dirs:
        c = next(j for j, v in enumerate(y) if v)
        f = out[c]
        if f:
            out = [(o - f * v) % p for o, v in zip(out, y)]
    return tuple(out)


# ---------------------------------------------------------------------------
# restriction


def restrict_to_subspace(poly: MultiPoly, s: AffineSubspace) -> MultiPoly:
    """q(alpha) = poly(base + sum alpha_i y_i) in the subspace's own coordinates."""
    if poly.field != s.field:
        raise FieldMismatch("polynomial and subspace over different fields")
    if poly.nvars != s.ambient:
        raise DimensionMismatch(f"{poly.nvars}-variate polynomial on F^{s.ambient}")
    k = s.dim
    deg = poly.total_degree
    if deg < 0:
        return MultiPoly.zero(poly.field, k)
    q = poly.modulus
    if k == 0:
        return MultiPoly.constant(poly.field, 0, poly(s.base))
    if deg < q and (deg + 1) ** k <= ENUM_CAP:
        grid = np.array(list(itertools.product(range(deg + 1), repeat=k)), dtype=np.int64)
        vals = poly.evaluate_many(s.points_many(grid)).reshape((deg + 1,) * k)
        return poly_from_tensor(poly.field, tensor_interpolate(poly.field, vals), deg)
    forms = []
    for j in range(s.ambient):
        terms = {(0,) * k: s.base[j]}
        for i, y in enumerate(s.directions):
            e = [0] * k
            e[i] = 1
            terms[tuple(e)] = terms.get(tuple(e), 0) + y[j]
        forms.append(MultiPoly(poly.field, k, terms))
    return poly.compose(forms)


@dataclass(frozen=True)
class Curve4:
    """Curve t -> (c_1(t), ..., c_m(t)); coeffs[j][k] multiplies t^k in c_j."""

    field: Field
    coeffs: tuple

    def __post_init__(self):
        p = self.field.modulus
        rows = tuple(_residues(row, p) for row in self.coeffs)
        if any(len(row) > 5 for row in rows):
            raise DegreeError("curve coordinates must have degree at most 4")
        object.__setattr__(self, "coeffs", rows)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def degree(self) -> int:
        return max((max((k for k, c in enumerate(row) if c), default=0) for row in self.coeffs), default=0)

    def __call__(self, t: int) -> tuple:
        p = self.field.modulus
        t = int(t) % p
        out = []
        for row in self.coeffs:
            v = 0
            for c in reversed(row):
                v = (v * t + c) % p
            out.append(v)
        return tuple(out)

    def points_many(self, ts) -> np.ndarray:
        p = self.field.modulus
        dtype = _int_dtype(p)
        ts = np.asarray(ts, dtype=dtype).reshape(-1) % p
        width = max((len(r) for r in self.coeffs), default=1)
        c = np.zeros((self.dim, width), dtype=dtype)
        for j, row in enumerate(self.coeffs):
            c[j, : len(row)] = row
        pw = np.ones((ts.shape[0], width), dtype=dtype)
        for k in range(1, width):
            pw[:, k] = pw[:, k - 1] * ts % p
        return matmul_mod(pw, c.T, p)

    def coordinate(self, j: int) -> MultiPoly:
        return MultiPoly.univariate(self.field, self.coeffs[j])


CURVE_PARAMS = (0, 1, 2, 3)


def curve_through(points: Sequence[Sequence[int]], field) -> Curve4:
    """Curve of degree <= 3 with c(0..3) equal to the four given points."""
    field = _as_field(field)
    if field.modulus < 4:
        raise DegreeError("curves through 4 points need |F| >= 4")
    if len(points) != 4:
        raise InputError("exactly four points are required")
    p = field.modulus
    vals = np.array([_residues(pt, p) for pt in points], dtype=_int_dtype(p))
    if len(set(len(pt) for pt in points)) != 1:
        raise DimensionMismatch("points have different dimensions")
    inv = _inverse_vandermonde(p, CURVE_PARAMS)
    coeffs = matmul_mod(inv, vals, p).T
    return Curve4(field, tuple(tuple(int(c) for c in row) for row in coeffs))


def restrict_to_curve(poly: MultiPoly, c: Curve4) -> MultiPoly:
    """Univariate t -> poly(c(t))."""
    if poly.field != c.field:
        raise FieldMismatch("polynomial and curve over different fields")
    if poly.nvars != c.dim:
        raise DimensionMismatch(f"{poly.nvars}-variate polynomial on a curve in F^{c.dim}")
    deg = poly.total_degree
    if deg < 0:
        return MultiPoly.zero(poly.field, 1)
    bound = deg * max(c.degree, 1)
    if bound < poly.modulus:
        ts = np.arange(bound + 1)
        vals = poly.evaluate_many(c.points_many(ts))
        inv = interpolation_matrix(poly.field, bound + 1)
        coeffs = matmul_mod(inv, vals.reshape(-1, 1), poly.modulus).reshape(-1)
        return MultiPoly.univariate(poly.field, [int(x) for x in coeffs])
    return poly.compose([c.coordinate(j) for j in range(c.dim)])


# ---------------------------------------------------------------------------
# Schwartz-Zippel


def zero_fraction(poly: MultiPoly, trials: int | None = None, rng=None, cap: int = ENUM_CAP) -> Fraction:
    """Fraction of zeros: exhaustive over F^m when ``trials`` is None, else sampled."""
    if poly.is_zero():
        raise InputError("zero polynomial has no meaningful zero fraction")
    q, m = poly.modulus, poly.nvars
    if trials is None:
        if q**m > cap:
            raise TooLarge(f"{q}^{m} points exceed cap {cap}")
        pts = np.array(list(itertools.product(range(q), repeat=m)), dtype=np.int64).reshape(-1, m)
        vals = poly.evaluate_many(pts)
        return Fraction(int(np.count_nonzero(vals == 0)), q**m)
    from .rng import as_generator

    gen = as_generator(rng)
    pts = poly.field.sample(gen, (int(trials), m))
    vals = poly.evaluate_many(pts)
    return Fraction(int(np.count_nonzero(vals == 0)), int(trials))


def random_poly(field, nvars: int, degree: int, rng, density: float = 1.0) -> MultiPoly:
    """Random polynomial of total degree <= ``degree`` (each monomial kept with prob density)."""
    field = _as_field(field)
    terms = {}
    for e in monomials(nvars, degree):
        if density >= 1.0 or rng.random() < density:
            terms[e] = int(rng.integers(0, field.modulus))
    return MultiPoly(field, nvars, terms)


def monomials(nvars: int, degree: int) -> Iterable[tuple]:
    """All exponent tuples of total degree <= degree."""
    if nvars == 0:
        yield ()
        return
    for first in range(degree + 1):
        for rest in monomials(nvars - 1, degree - first):
            yield (first,) + rest

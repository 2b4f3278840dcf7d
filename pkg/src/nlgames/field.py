"""Prime-field arithmetic.

Field elements inside the polynomial and protocol code are plain ``int``
residues in ``[0, p)``; :class:`FieldElem` is the checked value type for
callers that want operator syntax and field-mismatch detection.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, FieldMismatch, InputError, NotPrime

MAX_MODULUS = 1 << 62

# Deterministic Miller-Rabin witness set, valid for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


@dataclass(frozen=True)
class Field:
    """The prime field F_p."""

    modulus: int

    def __post_init__(self):
        p = self.modulus
        if not isinstance(p, (int, np.integer)) or p < 2 or not is_prime(int(p)):
            raise NotPrime(f"{p} is not a prime modulus")
        if p >= MAX_MODULUS:
            raise InputError(f"modulus {p} exceeds 2^62")
        object.__setattr__(self, "modulus", int(p))

    @property
    def p(self) -> int:
        return self.modulus

    @property
    def bit_length(self) -> int:
        return self.modulus.bit_length()

    def __len__(self):
        return self.modulus

    def __repr__(self):
        return f"F{self.modulus}"

    def __call__(self, value: int) -> "FieldElem":
        return FieldElem(int(value) % self.modulus, self)

    # residue-level operations, used on hot paths
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def neg(self, a: int) -> int:
        return -a % self.modulus

    def inv(self, a: int) -> int:
        a %= self.modulus
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in {self!r}")
        return pow(a, self.modulus - 2, self.modulus)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.modulus)
        return pow(a, e, self.modulus)

    def sample(self, rng: np.random.Generator, size=None):
        """Uniform residue(s); numpy's bounded integer draw is rejection based."""
        if size is None:
            return int(rng.integers(0, self.modulus))
        return rng.integers(0, self.modulus, size=size, dtype=np.int64)

    def elements(self) -> range:
        return range(self.modulus)


@lru_cache(maxsize=None)
def make_field(modulus: int) -> Field:
    return Field(int(modulus))


@dataclass(frozen=True)
class FieldElem:
    residue: int
    field: Field

    def __post_init__(self):
        if not 0 <= self.residue < self.field.modulus:
            raise InputError(f"residue {self.residue} outside [0, {self.field.modulus})")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.residue
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.modulus
        return NotImplemented

    def _wrap(self, r: int) -> "FieldElem":
        return FieldElem(r % self.field.modulus, self.field)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.residue + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.residue - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self.residue)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.residue * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.residue)

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field.inv(self.residue), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.residue * self.field.inv(o))

    def __pow__(self, e: int):
        return FieldElem(self.field.pow(self.residue, int(e)), self.field)

    def __int__(self):
        return self.residue

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.residue == other.residue
        if isinstance(other, (int, np.integer)):
            return self.residue == int(other) % self.field.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.field.modulus))

    def __repr__(self):
        return f"{self.residue} (mod {self.field.modulus})"


def arith(op: str, *operands: FieldElem) -> FieldElem:
    """Dispatch ``add``, ``mul``, ``neg``, ``inv`` or ``pow`` on field elements.

    ``pow`` takes a field element and a plain integer exponent.
    """
    if op == "add":
        a, b = operands
        return a + b
    if op == "mul":
        a, b = operands
        return a * b
    if op == "neg":
        (a,) = operands
        return -a
    if op == "inv":
        (a,) = operands
        return a.inverse()
    if op == "pow":
        a, e = operands
        return a ** int(e)
    raise InputError(f"unknown field operation {op!r}")


def sample_uniform(field: Field, rng: np.random.Generator) -> FieldElem:
    return FieldElem(field.sample(rng), field)


# ---------------------------------------------------------------------------
# vectorised residue arithmetic used by the polynomial fast paths


def _chunk(p: int) -> int:
    # number of products of two residues that can be summed in int64
    return max(1, (2**63 - 1) // max(1, (p - 1) ** 2))


def vec_ok(p: int) -> bool:
    return p < (1 << 31)


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``a @ b mod p`` for residue matrices without int64 overflow."""
    if not vec_ok(p):
        out = np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)
        return np.asarray(out % p, dtype=object)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    k = a.shape[-1]
    step = _chunk(p)
    if k <= step:
        return (a @ b) % p
    out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    for s in range(0, k, step):
        out = (out + (a[..., s : s + step] @ b[s : s + step]) % p) % p
    return out


def inv_matrix_mod(m: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square residue matrix by Gauss-Jordan elimination."""
    n = m.shape[0]
    aug = [[int(x) % p for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise DivisionByZero("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        iv = pow(aug[col][col], p - 2, p)
        aug[col] = [x * iv % p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % p for x, y in zip(aug[r], aug[col])]
    dtype = np.int64 if vec_ok(p) else object
    return np.array([row[n:] for row in aug], dtype=dtype)

"""Fourier expansion of answer functions over the long code.

F_U is the set of functions {±1}^U -> {±1}.  With N = 2^|U| inputs, a
function f is the N-bit mask whose bit x is set when f(x) = -1, and a subset
α of inputs is an N-bit mask too, so χ_α(f) = (-1)^{|α ∩ f|}.  An answer
function A is an array over all 2^N functions (±1 values, or operators
stacked along the first axis).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError, TooLarge

U_CAP = 4


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Unnormalised transform along axis 0: out[α] = Σ_f (-1)^{|α ∩ f|} values[f]."""
    a = np.array(values, dtype=float if not np.iscomplexobj(values) else complex)
    n = a.shape[0]
    if n & (n - 1):
        raise InputError("length must be a power of two")
    rest = a.shape[1:]
    h = 1
    while h < n:
        a = a.reshape((n // (2 * h), 2, h) + rest)
        x, y = a[:, 0].copy(), a[:, 1].copy()
        a[:, 0], a[:, 1] = x + y, x - y
        a = a.reshape((n,) + rest)
        h *= 2
    return a


def chi(alpha: int, f: int) -> int:
    return -1 if bin(alpha & f).count("1") & 1 else 1


@dataclass
class FourierTable:
    """Coefficients Â_α indexed by the input-set mask α."""

    n_vars: int
    coeffs: np.ndarray

    @property
    def n_inputs(self) -> int:
        return 1 << self.n_vars

    def __getitem__(self, alpha: int):
        return self.coeffs[alpha]

    def support(self, tol: float = 1e-12) -> list[int]:
        norms = self.weights()
        return [int(a) for a in np.nonzero(norms > tol)[0]]

    def weights(self) -> np.ndarray:
        """Â_α² (scalar case) or Tr Â_α² / dim (operator case)."""
        c = self.coeffs
        if c.ndim == 1:
            return np.abs(c) ** 2
        sq = np.einsum("aij,ajk->aik", c, c)
        return np.real(np.trace(sq, axis1=1, axis2=2)) / c.shape[1]

    def parseval(self) -> float:
        return float(self.weights().sum())

    def inverse(self) -> np.ndarray:
        """A_f = Σ_α χ_α(f) Â_α."""
        return walsh_hadamard(self.coeffs)

    @staticmethod
    def members(alpha: int) -> list[int]:
        return [x for x in range(alpha.bit_length()) if (alpha >> x) & 1]


def fourier_transform(A, n_vars: int) -> FourierTable:
    """Â_α = E_f χ_α(f) A_f over all 2^{2^n_vars} functions f."""
    if n_vars > U_CAP:
        raise TooLarge(f"|U| = {n_vars} exceeds cap {U_CAP}")
    A = np.asarray(A)
    nf = 1 << (1 << n_vars)
    if A.shape[0] != nf:
        raise InputError(f"expected {nf} functions, got {A.shape[0]}")
    return FourierTable(n_vars, walsh_hadamard(A) / nf)


def negate_index(n_vars: int) -> int:
    """XOR mask taking f to -f."""
    return (1 << (1 << n_vars)) - 1


def dictator(n_vars: int, x: int) -> np.ndarray:
    """A_f = f(x) as ±1 values."""
    fs = np.arange(1 << (1 << n_vars), dtype=np.int64)
    return 1 - 2 * ((fs >> x) & 1)


def fold(A: np.ndarray, n_vars: int) -> np.ndarray:
    """A_f := s·A_{rep}, rep the member of {f, -f} with f(all-false) = +1, s its sign."""
    fs = np.arange(1 << (1 << n_vars), dtype=np.int64)
    sign = 1 - 2 * (fs & 1)
    rep = np.where(fs & 1, fs ^ negate_index(n_vars), fs)
    A = np.asarray(A)
    return sign.reshape((-1,) + (1,) * (A.ndim - 1)) * A[rep]


class FourierDecoder:
    """Measure {Â_α²}, answer a uniformly random x ∈ α (an assignment to U)."""

    def __init__(self, table: FourierTable, tol: float = 1e-9):
        w = table.weights()
        total = float(w.sum())
        if abs(total - 1) > tol:
            raise InputError(f"weights sum to {total}, not 1")
        self.table = table
        self.probs = w / total

    def distribution(self) -> dict:
        """{assignment x: probability} obtained by averaging over α."""
        out: dict = {}
        for alpha, p in enumerate(self.probs):
            if p <= 0:
                continue
            xs = FourierTable.members(alpha) or list(range(self.table.n_inputs))
            for x in xs:
                out[x] = out.get(x, 0.0) + p / len(xs)
        return out

    def sample(self, rng) -> int:
        alpha = int(rng.choice(len(self.probs), p=self.probs))
        xs = FourierTable.members(alpha)
        if not xs:  # empty set: no information, answer uniformly
            return int(rng.integers(0, self.table.n_inputs))
        return xs[int(rng.integers(0, len(xs)))]


def decode_strategy(tables: dict) -> dict:
    """Decoder per question set from its Fourier table."""
    return {key: FourierDecoder(t) for key, t in tables.items()}

"""Small-dimension states, sub-measurements and consistency metrics.

All contractions are exact dense tensor operations on an r-register state
stored as an array of shape (d,)*r.  For a permutation-invariant state the
bilinear form <A, B> = <Ψ| A ⊗ B ⊗ Id |Ψ> does not depend on which two
registers carry A and B; :func:`pairwise_form` can check that directly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, InputError, InvariantError, TooLarge
from .gamecore import PSD_FLOOR, QuantumStrategy, permute_registers

COMPLETENESS_SLACK = 1e-10
PROJECTIVE_TOL = 1e-8
IMAG_TOL = 1e-9
WALK_CAP = 64


# ---------------------------------------------------------------------------
# states


class MultiRegisterState:
    """Unit vector on (C^d)^{⊗r}."""

    def __init__(self, r: int, dim: int, amplitudes, tol: float = 1e-10):
        if r < 1 or dim < 1:
            raise InputError("need r >= 1 registers of dimension >= 1")
        psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if psi.size != dim**r:
            raise DimensionMismatch(f"{psi.size} amplitudes for {r} registers of dimension {dim}")
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1) > tol:
            raise InvariantError(f"state norm {nrm!r} differs from 1")
        self.r = r
        self.dim = dim
        self.vector = psi
        self.tensor = psi.reshape((dim,) * r)

    @classmethod
    def normalized(cls, r: int, dim: int, amplitudes) -> "MultiRegisterState":
        psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(r, dim, psi / np.linalg.norm(psi))

    def permuted(self, perm: Sequence[int]) -> np.ndarray:
        return permute_registers(self.tensor, perm)

    def swap_residual(self) -> float:
        """Largest deviation under any register permutation."""
        return max(
            float(np.abs(self.permuted(p) - self.tensor).max())
            for p in itertools.permutations(range(self.r))
        )

    def is_permutation_invariant(self, tol: float = 1e-10) -> bool:
        return self.swap_residual() <= tol

    def reduced_density(self, registers: Sequence[int] = (0,)) -> np.ndarray:
        """Density matrix on the listed registers (in order)."""
        keep = list(registers)
        rest = [i for i in range(self.r) if i not in keep]
        t = np.transpose(self.tensor, keep + rest).reshape(self.dim ** len(keep), -1)
        return t @ t.conj().T

    def apply(self, op: np.ndarray, register: int, tensor: np.ndarray | None = None) -> np.ndarray:
        """op acting on one register of ``tensor`` (default: the state)."""
        t = self.tensor if tensor is None else tensor
        op = np.asarray(op)
        if op.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"operator shape {op.shape} on registers of dimension {self.dim}")
        out = np.tensordot(op, t, axes=([1], [register]))
        return np.moveaxis(out, 0, register)

    def expectation(self, ops: Mapping[int, np.ndarray]) -> complex:
        """<Ψ| ⊗_i ops[i] |Ψ> with identity on unlisted registers."""
        t = self.tensor
        for reg, op in ops.items():
            t = self.apply(op, reg, t)
        return complex(np.vdot(self.tensor, t))


def symmetric_state(r: int, dim: int, rng) -> MultiRegisterState:
    """Random permutation-invariant state: symmetrised Gaussian vector."""
    g = rng.normal(size=(dim,) * r) + 1j * rng.normal(size=(dim,) * r)
    s = sum(permute_registers(g, p) for p in itertools.permutations(range(r)))
    return MultiRegisterState.normalized(r, dim, s)


def schmidt_diagonal_state(r: int, weights) -> MultiRegisterState:
    """Σ_i sqrt(w_i) |i...i>, permutation-invariant."""
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    dim = len(w)
    t = np.zeros((dim,) * r, dtype=complex)
    for i, wi in enumerate(w):
        t[(i,) * r] = math.sqrt(wi)
    return MultiRegisterState(r, dim, t)


def ghz(r: int, dim: int = 2) -> MultiRegisterState:
    return schmidt_diagonal_state(r, np.ones(dim))


def epr() -> MultiRegisterState:
    return ghz(2, 2)


# ---------------------------------------------------------------------------
# sub-measurements


@dataclass
class SubMeasurement:
    """Outcome-labelled PSD operators on one register with Σ ≼ Id."""

    elements: dict
    projective: bool = False
    validate: bool = True

    def __post_init__(self):
        self.elements = {k: np.asarray(v, dtype=complex) for k, v in self.elements.items()}
        if not self.elements:
            raise InputError("a sub-measurement needs at least one outcome")
        if self.validate:
            self.check()

    @property
    def dim(self) -> int:
        return next(iter(self.elements.values())).shape[0]

    def total(self) -> np.ndarray:
        return sum(self.elements.values())

    def check(self):
        d = self.dim
        for k, m in self.elements.items():
            if m.shape != (d, d):
                raise DimensionMismatch(f"element {k!r} has shape {m.shape}")
            if np.abs(m - m.conj().T).max() > 1e-10:
                raise InvariantError(f"element {k!r} is not Hermitian")
            lo = float(np.linalg.eigvalsh(m).min())
            if lo < PSD_FLOOR:
                raise InvariantError(f"element {k!r} has eigenvalue {lo:.3e}")
            if self.projective and np.abs(m @ m - m).max() > PROJECTIVE_TOL:
                raise InvariantError(f"element {k!r} is not a projector")
        top = float(np.linalg.eigvalsh(self.total()).max())
        if top > 1 + COMPLETENESS_SLACK:
            raise InvariantError(f"elements sum above identity (top eigenvalue {top:.12f})")

    def is_complete(self, tol: float = COMPLETENESS_SLACK) -> bool:
        return bool(np.abs(self.total() - np.eye(self.dim)).max() <= tol)

    def __getitem__(self, key):
        return self.elements.get(key, np.zeros((self.dim, self.dim), dtype=complex))

    def __iter__(self):
        return iter(self.elements)

    def scaled(self, c: float) -> "SubMeasurement":
        return SubMeasurement({k: c * m for k, m in self.elements.items()})


def basis_measurement(dim: int, unitary: np.ndarray | None = None) -> SubMeasurement:
    """Projective measurement onto the columns of ``unitary`` (default: computational basis)."""
    u = np.eye(dim, dtype=complex) if unitary is None else np.asarray(unitary, dtype=complex)
    return SubMeasurement({i: np.outer(u[:, i], u[:, i].conj()) for i in range(dim)}, projective=True)


def random_unitary(dim: int, rng) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_projective(dim: int, outcomes: Sequence, rng) -> SubMeasurement:
    """Random basis split into len(outcomes) groups (some possibly empty)."""
    u = random_unitary(dim, rng)
    labels = rng.integers(0, len(outcomes), size=dim)
    els = {a: np.zeros((dim, dim), dtype=complex) for a in outcomes}
    for i, lab in enumerate(labels):
        els[outcomes[lab]] += np.outer(u[:, i], u[:, i].conj())
    return SubMeasurement(els, projective=True)


def rotated_measurement(meas: SubMeasurement, angle: float, rng) -> SubMeasurement:
    """Conjugate every element by exp(-i·angle·H) for a random Hermitian H of unit norm."""
    d = meas.dim
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (h + h.conj().T) / 2
    h /= np.linalg.norm(h, 2)
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * angle * w)) @ v.conj().T
    return SubMeasurement({k: u @ m @ u.conj().T for k, m in meas.elements.items()}, meas.projective)


# ---------------------------------------------------------------------------
# bilinear form and norms


def _real(z: complex, what: str) -> float:
    if abs(complex(z).imag) > IMAG_TOL:
        raise InvariantError(f"{what} has imaginary part {complex(z).imag:.3e}")
    return float(complex(z).real)


def pairwise_form(A, B, state: MultiRegisterState, placement: tuple[int, int] = (0, 1)) -> complex:
    """<Ψ| A ⊗ B ⊗ Id |Ψ> with A, B on the given registers."""
    if state.r < 2:
        raise InputError("the bilinear form needs r >= 2")
    i, j = placement
    if i == j:
        raise InputError("A and B must act on distinct registers")
    return state.expectation({i: A, j: B})


def placement_spread(A, B, state: MultiRegisterState) -> float:
    """Largest difference of the form over all ordered register pairs."""
    vals = [pairwise_form(A, B, state, p) for p in itertools.permutations(range(state.r), 2)]
    return max(abs(v - vals[0]) for v in vals)


def trace_rho(A, state: MultiRegisterState) -> complex:
    """Tr_ρ(A) = <Ψ| A ⊗ Id |Ψ>."""
    return state.expectation({0: A})


def state_norm(A, state: MultiRegisterState) -> tuple[float, float]:
    """(‖A‖_Ψ from A A†, ‖A‖'_Ψ from A† A)."""
    A = np.asarray(A, dtype=complex)
    n1 = _real(trace_rho(A @ A.conj().T, state), "‖A‖²")
    n2 = _real(trace_rho(A.conj().T @ A, state), "‖A‖'²")
    return math.sqrt(max(n1, 0.0)), math.sqrt(max(n2, 0.0))


def cauchy_schwarz_slack(A, B, state: MultiRegisterState) -> float:
    """min(‖A‖‖B‖', ‖A‖'‖B‖) - |<A, B>|, nonnegative up to rounding."""
    na, na2 = state_norm(A, state)
    nb, nb2 = state_norm(B, state)
    return min(na * nb2, na2 * nb) - abs(pairwise_form(A, B, state))


# ---------------------------------------------------------------------------
# consistency parameters


@dataclass
class ConsistencyReport:
    delta: float
    gamma: float
    eta: float

    def as_dict(self) -> dict:
        return {"delta": self.delta, "gamma": self.gamma, "eta": self.eta}


def consistency_metrics(
    M: SubMeasurement,
    A: Mapping,
    state: MultiRegisterState,
    points: Mapping | Sequence | None = None,
) -> ConsistencyReport:
    """δ, γ, η of a sub-measurement M over functions g: V -> outcomes.

    Outcomes of M are functions given as tuples or mappings indexed by v.
    ``A`` maps each point v to a SubMeasurement; ``points`` gives the point
    distribution (uniform over A's keys by default).
    """
    if points is None:
        keys = list(A)
        dist = {v: 1 / len(keys) for v in keys}
    elif isinstance(points, Mapping):
        dist = dict(points)
    else:
        dist = {v: 1 / len(points) for v in points}
    delta = 0.0
    for v, p in dist.items():
        Av = A[v]
        for g, Mg in M.elements.items():
            gv = g[v]
            for a, Aa in Av.elements.items():
                if a != gv:
                    delta += p * _real(pairwise_form(Mg, Aa, state), "δ term")
    tot = M.total()
    eye = np.eye(M.dim)
    gamma = _real(pairwise_form(tot, eye - tot, state), "γ")
    eta = 1 - _real(trace_rho(tot, state), "Tr_ρ(M)")
    return ConsistencyReport(delta, gamma, eta)


def consistency_with_family(M: SubMeasurement, family: Mapping, state: MultiRegisterState) -> float:
    """Σ_g <Id - A^g, M^g> for operators A^g indexed like M."""
    eye = np.eye(M.dim)
    return sum(_real(pairwise_form(eye - family[g], Mg, state), "consistency") for g, Mg in M.elements.items())


def self_consistency(A: Mapping, state: MultiRegisterState, points=None) -> float:
    """E_v Σ_a <A_v^a, Id - A_v^a>."""
    keys = list(A) if points is None else list(points)
    eye = None
    total = 0.0
    for v in keys:
        for a, m in A[v].elements.items():
            eye = np.eye(m.shape[0]) if eye is None else eye
            total += _real(pairwise_form(m, eye - m, state), "self-consistency")
    return total / len(keys)


# ---------------------------------------------------------------------------
# closeness from consistency


def closeness_derived_bound(delta: float) -> float:
    """Bound on Σ_a ‖A^a - B^a‖²_Ψ obtained by tracking the constants through the proof.

    Splitting Σ_a Tr_ρ(A^a B^a) into three Cauchy-Schwarz steps, with the
    self-inconsistency of B bounded by 2δ via a third register, gives
    Σ_a Re Tr_ρ(A^a B^a) >= 1 - δ - √2 δ - √(2δ).
    """
    d = max(delta, 0.0)
    return 2 * (1 + math.sqrt(2)) * d + 2 * math.sqrt(2) * math.sqrt(d)


def closeness_stated_bound(delta: float) -> float:
    d = max(delta, 0.0)
    return 2 * d + 4 * math.sqrt(d)


@dataclass
class ClosenessReport:
    lhs: float
    delta: float
    bound: float
    derived_bound: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.bound + 1e-12

    @property
    def derived_holds(self) -> bool:
        return self.lhs <= self.derived_bound + 1e-12

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "delta": self.delta,
            "bound": self.bound,
            "derived_bound": self.derived_bound,
            "holds": self.holds,
            "derived_holds": self.derived_holds,
        }


def closeness_from_consistency(A: SubMeasurement, B: SubMeasurement, state: MultiRegisterState) -> ClosenessReport:
    """lhs = Σ_a ‖A^a - B^a‖²_Ψ against bounds in δ = 1 - Σ_a <A^a, B^a>."""
    if state.r < 3:
        raise InputError("closeness from consistency needs r >= 3")
    labels = list(dict.fromkeys(list(A.elements) + list(B.elements)))
    lhs = 0.0
    overlap = 0.0
    for a in labels:
        diff = A[a] - B[a]
        lhs += state_norm(diff, state)[0] ** 2
        overlap += _real(pairwise_form(A[a], B[a], state), "<A^a, B^a>")
    delta = 1 - overlap
    return ClosenessReport(lhs, delta, closeness_stated_bound(delta), closeness_derived_bound(delta))


# ---------------------------------------------------------------------------
# robust triples


@dataclass
class RobustTripleSpec:
    """Graph on V, per-vertex measurements with outcomes S, and a function family."""

    vertices: list
    edges: list
    measurements: dict
    functions: list
    neighbors: dict = field(init=False)

    def __post_init__(self):
        if not self.functions:
            raise InputError("the function family must be nonempty")
        self.neighbors = {v: [] for v in self.vertices}
        for u, v in self.edges:
            if u == v:
                continue
            self.neighbors[u].append(v)
            self.neighbors[v].append(u)
        for v in self.vertices:
            if not self.measurements[v].is_complete():
                raise InvariantError(f"measurement at {v!r} is not complete")
        for g in self.functions:
            for v in self.vertices:
                g[v]

    @classmethod
    def complete_graph(cls, vertices, measurements, functions) -> "RobustTripleSpec":
        edges = list(itertools.combinations(vertices, 2))
        return cls(list(vertices), edges, measurements, functions)

    def transition(self) -> np.ndarray:
        """Simple random walk matrix: uniform over neighbours, self excluded."""
        idx = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        P = np.zeros((n, n))
        for v in self.vertices:
            nb = self.neighbors[v]
            if not nb:
                P[idx[v], idx[v]] = 1.0
                continue
            for u in nb:
                P[idx[v], idx[u]] += 1 / len(nb)
        return P


def intersection_max(functions: Sequence, vertices: Sequence) -> float:
    """max_{g != g'} Pr_v[g(v) = g'(v)] over uniform v."""
    best = 0.0
    for g, h in itertools.combinations(functions, 2):
        agree = sum(g[v] == h[v] for v in vertices) / len(vertices)
        best = max(best, agree)
    return best


def mixing_curve(spec: RobustTripleSpec, steps: int) -> list[float]:
    """E_v ‖p_k(v) - u‖_1 for k = 1..steps."""
    if steps > WALK_CAP:
        raise TooLarge(f"{steps} walk steps exceed cap {WALK_CAP}")
    P = spec.transition()
    n = P.shape[0]
    u = np.full(n, 1 / n)
    dist = np.eye(n)
    out = []
    for _ in range(steps):
        dist = dist @ P
        out.append(float(np.abs(dist - u).sum(axis=1).mean()))
    return out


@dataclass
class RobustTripleReport:
    self_consistency: float
    max_intersection: float
    stability: float
    mixing: list

    def as_dict(self) -> dict:
        return {
            "delta1": self.self_consistency,
            "delta2": self.max_intersection,
            "delta3": self.stability,
            "mixing": list(self.mixing),
        }


def robust_triple_metrics(
    spec: RobustTripleSpec, state: MultiRegisterState, R: SubMeasurement, steps: int = 8
) -> RobustTripleReport:
    """δ₁ self-consistency, δ₂ max intersection, δ₃ stability against probe R, mixing curve."""
    V = spec.vertices
    A = spec.measurements
    d1 = self_consistency(A, state, V)
    d2 = intersection_max(spec.functions, V)
    d3 = 0.0
    for v in V:
        nb = spec.neighbors[v]
        if not nb:
            continue
        for u in nb:
            for gi, g in enumerate(spec.functions):
                Rg = R[gi] if gi in R.elements else R[tuple(g[x] for x in V)]
                diff = A[v][g[v]] - A[u][g[u]]
                d3 += _real(pairwise_form(Rg, diff @ diff, state), "stability") / (len(V) * len(nb))
    return RobustTripleReport(d1, d2, d3, mixing_curve(spec, steps))


# ---------------------------------------------------------------------------
# canned strategies


def _observable_povm(theta: float) -> dict:
    """Two-outcome projective measurement of cos(θ) Z + sin(θ) X."""
    Z = np.array([[1, 0], [0, -1]], dtype=complex)
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    O = math.cos(theta) * Z + math.sin(theta) * X
    eye = np.eye(2)
    return {0: (eye + O) / 2, 1: (eye - O) / 2}


def chsh_strategy() -> QuantumStrategy:
    """EPR pair; Alice measures at angles 0, π/2, Bob at ±π/4 (observables on the x-z plane).

    In the Bloch picture Alice's observables are Z and X and Bob's are
    (Z ± X)/√2, i.e. the familiar 0, π/4 and ±π/8 measurement angles.
    """
    state = epr().vector
    alice = {0: _observable_povm(0.0), 1: _observable_povm(math.pi / 2)}
    bob = {0: _observable_povm(math.pi / 4), 1: _observable_povm(-math.pi / 4)}
    return QuantumStrategy((2, 2), state, [alice, bob])


def canned_strategies() -> dict:
    return {"chsh": chsh_strategy(), "ghz3": ghz(3), "epr": epr()}


def classical_embedding(functions: Sequence[Callable | Mapping], questions: Sequence, answers: Sequence) -> QuantumStrategy:
    """Deterministic strategy as projectors on a product state of qubits.

    Each player has a one-dimensional register padded to dimension 1, so the
    state is the scalar 1 and A_q^a is 1 exactly when f(q) = a.
    """
    r = len(functions)
    povms = []
    for f in functions:
        fam = {}
        for q in questions:
            val = f(q) if callable(f) else f[q]
            fam[q] = {a: np.array([[1.0 if a == val else 0.0]]) for a in answers}
        povms.append(fam)
    return QuantumStrategy((1,) * r, np.ones(1), povms)

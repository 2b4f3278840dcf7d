"""Semidefinite programs: a small dense solver front end and its clients.

:class:`SdpProblem` is a real-symmetric block SDP.  :func:`solve_sdp` solves
the primal and the explicitly written dual as two separate conic programs
(cvxpy with Clarabel), so the reported duality gap compares two independent
optima.  Complex Hermitian programs are mapped to real ones with the
embedding H -> [[Re H, -Im H], [Im H, Re H]].
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import cvxpy as cp
import numpy as np

from .errors import DimensionMismatch, InputError, InvalidGame, InvariantError, TooLarge, Unsolved
from .gamecore import Game, QuantumStrategy
from .quantumlab import MultiRegisterState, SubMeasurement, random_unitary, self_consistency, trace_rho

DEFAULT_TOL = 1e-7
ITER_CAP = 10**4
DIM_CAP = 200
SENSES = ("<=", ">=", "==")


def embed(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    re, im = H.real, H.imag
    return np.block([[re, -im], [im, re]])


def unembed(Y: np.ndarray) -> np.ndarray:
    n = Y.shape[0] // 2
    return (Y[:n, :n] + Y[n:, n:]) / 2 + 1j * (Y[n:, :n] - Y[:n, n:]) / 2


def psd_sqrt(M: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(M)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


@dataclass
class SdpProblem:
    """maximize Σ Tr(C_i X_i) over symmetric X_i ≽ 0 subject to

    * scalar rows ``(terms, sense, b)``: Σ_{(i, A)} Tr(A X_i) sense b,
    * matrix rows ``(terms, sense, M)``: Σ_{(i, c)} c X_i sense M (≼, ≽ or =).
    """

    blocks: list
    objective: list
    scalar: list = field(default_factory=list)
    lmis: list = field(default_factory=list)

    def __post_init__(self):
        if sum(self.blocks) > DIM_CAP:
            raise TooLarge(f"total variable dimension {sum(self.blocks)} exceeds {DIM_CAP}")

        def sym(i, A, what):
            A = np.asarray(A, dtype=float)
            if A.shape != (self.blocks[i], self.blocks[i]):
                raise DimensionMismatch(f"{what} has shape {A.shape}, block {i} has size {self.blocks[i]}")
            if np.abs(A - A.T).max() > 1e-12:
                raise InputError(f"{what} is not symmetric")
            return (A + A.T) / 2

        self.objective = [(i, sym(i, C, "objective")) for i, C in self.objective]
        rows = []
        for terms, sense, b in self.scalar:
            if sense not in SENSES:
                raise InputError(f"unknown sense {sense!r}")
            rows.append(([(i, sym(i, A, "constraint")) for i, A in terms], sense, float(b)))
        self.scalar = rows
        lmis = []
        for terms, sense, M in self.lmis:
            if sense not in SENSES:
                raise InputError(f"unknown sense {sense!r}")
            sizes = {self.blocks[i] for i, _ in terms}
            if len(sizes) != 1:
                raise DimensionMismatch("matrix constraint mixes block sizes")
            n = sizes.pop()
            M = np.asarray(M, dtype=float)
            if M.shape != (n, n) or np.abs(M - M.T).max() > 1e-12:
                raise InputError("matrix constraint right-hand side must be symmetric of matching size")
            lmis.append(([(i, float(c)) for i, c in terms], sense, M))
        self.lmis = lmis

    def dump(self) -> dict:
        """Plain-data form (block sizes plus constraint triples) for cross-checking."""
        return {
            "blocks": list(self.blocks),
            "objective": [(i, C.tolist()) for i, C in self.objective],
            "scalar": [([(i, A.tolist()) for i, A in t], s, b) for t, s, b in self.scalar],
            "lmis": [(t, s, M.tolist()) for t, s, M in self.lmis],
        }


@dataclass
class SdpSolution:
    blocks: list
    y: np.ndarray
    Y: list
    primal_value: float
    dual_value: float
    log: dict

    @property
    def gap(self) -> float:
        return abs(self.primal_value - self.dual_value)


def _solve(problem: cp.Problem, tol: float, what: str):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            problem.solve(
                solver=cp.CLARABEL,
                max_iter=ITER_CAP,
                tol_gap_abs=tol * 1e-2,
                tol_gap_rel=tol * 1e-2,
                tol_feas=tol * 1e-2,
            )
    except cp.error.SolverError as exc:
        raise Unsolved(f"{what}: solver error {exc}") from None
    # an inaccurate finish is still screened by the primal-dual gap check
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise Unsolved(f"{what}: status {problem.status}")
    return problem.value


def solve_sdp(problem: SdpProblem, tol: float = DEFAULT_TOL) -> SdpSolution:
    """Solve primal and dual separately; Unsolved unless both converge with gap <= tol."""
    X = [cp.Variable((n, n), symmetric=True) for n in problem.blocks]
    cons = [x >> 0 for x in X]
    for terms, sense, b in problem.scalar:
        expr = sum(cp.trace(A @ X[i]) for i, A in terms)
        cons.append(expr <= b if sense == "<=" else expr >= b if sense == ">=" else expr == b)
    for terms, sense, M in problem.lmis:
        expr = sum(c * X[i] for i, c in terms)
        cons.append(expr << M if sense == "<=" else expr >> M if sense == ">=" else expr == M)
    obj = sum(cp.trace(C @ X[i]) for i, C in problem.objective) if problem.objective else cp.Constant(0)
    primal = cp.Problem(cp.Maximize(obj), cons)
    pval = _solve(primal, tol, "primal")

    # dual: min Σ y b + Σ s Tr(Y M)  s.t.  Σ y A_i + Σ s c Y - C_i ≽ 0
    y = cp.Variable(len(problem.scalar)) if problem.scalar else None
    Ys = []
    dcons = []
    for k, (_, sense, _) in enumerate(problem.scalar):
        if sense == "<=":
            dcons.append(y[k] >= 0)
        elif sense == ">=":
            dcons.append(y[k] <= 0)
    for terms, sense, M in problem.lmis:
        n = M.shape[0]
        Yl = cp.Variable((n, n), symmetric=True)
        if sense == "<=":
            dcons.append(Yl >> 0)
        elif sense == ">=":
            dcons.append(Yl << 0)
        Ys.append(Yl)
    for i, n in enumerate(problem.blocks):
        expr = cp.Constant(np.zeros((n, n)))
        for k, (terms, _, _) in enumerate(problem.scalar):
            for j, A in terms:
                if j == i:
                    expr = expr + y[k] * A
        for l, (terms, _, _) in enumerate(problem.lmis):
            for j, c in terms:
                if j == i:
                    expr = expr + c * Ys[l]
        for j, C in problem.objective:
            if j == i:
                expr = expr - C
        dcons.append((expr + expr.T) / 2 >> 0)
    dobj = cp.Constant(0.0)
    for k, (_, _, b) in enumerate(problem.scalar):
        dobj = dobj + b * y[k]
    for l, (_, _, M) in enumerate(problem.lmis):
        dobj = dobj + cp.trace(M @ Ys[l])
    dual = cp.Problem(cp.Minimize(dobj), dcons)
    dval = _solve(dual, tol, "dual")

    sol = SdpSolution(
        [np.asarray(x.value) for x in X],
        np.asarray(y.value) if y is not None else np.zeros(0),
        [np.asarray(Yl.value) for Yl in Ys],
        float(pval),
        float(dval),
        {
            "primal_iterations": primal.solver_stats.num_iters,
            "dual_iterations": dual.solver_stats.num_iters,
            "primal_status": primal.status,
            "dual_status": dual.status,
        },
    )
    if sol.gap > tol:
        raise Unsolved(f"duality gap {sol.gap:.3e} exceeds {tol:.1e}", best=sol)
    return sol


# ---------------------------------------------------------------------------
# consolidation SDP


def bar(A: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Complex conjugate of A taken in the eigenbasis of ρ."""
    _, U = np.linalg.eigh(rho)
    return U @ np.conj(U.conj().T @ A @ U) @ U.conj().T


@dataclass
class ConsolidationResult:
    T: dict
    T_raw: dict
    X: np.ndarray
    omega: float
    dual_value: float
    diagnostics: dict


def primal_objective(T: Mapping, rho: np.ndarray, Abar: Mapping) -> float:
    """Σ_g Tr(T^g ρ^{1/2} Ā^g ρ^{1/2}) for any feasible family."""
    r = psd_sqrt(rho)
    return float(sum(np.trace(T[g] @ r @ Abar[g] @ r).real for g in Abar))


def consolidation_sdp(rho: np.ndarray, Abar: Mapping, tol: float = DEFAULT_TOL) -> ConsolidationResult:
    """max Σ_g Tr(T^g ρ^{1/2} Ā^g ρ^{1/2}) over sub-measurements {T^g}, and its dual.

    A singular ρ is handled by restricting every operator to its support.
    """
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    if np.abs(rho - rho.conj().T).max() > 1e-10 or abs(np.trace(rho) - 1) > 1e-9:
        raise InvariantError("ρ must be Hermitian with unit trace")
    w, U = np.linalg.eigh(rho)
    if w.min() < -1e-10:
        raise InvariantError(f"ρ has eigenvalue {w.min():.3e}")
    keep = w > 1e-12
    Us = U[:, keep]
    k = Us.shape[1]
    half = np.diag(np.sqrt(w[keep]))
    labels = list(Abar)
    C = {}
    for g in labels:
        Ag = np.asarray(Abar[g], dtype=complex)
        if Ag.shape != (n, n):
            raise DimensionMismatch(f"Ā^{g!r} has shape {Ag.shape}")
        C[g] = half @ (Us.conj().T @ Ag @ Us) @ half
    prob = SdpProblem(
        blocks=[2 * k] * len(labels),
        objective=[(i, embed(C[g]).real / 2) for i, g in enumerate(labels)],
        lmis=[([(i, 1.0) for i in range(len(labels))], "<=", np.eye(2 * k))],
    )
    sol = solve_sdp(prob, tol)
    Ts = {g: unembed(sol.blocks[i]) for i, g in enumerate(labels)}
    Xs = 2 * unembed(sol.Y[0])
    omega = float(sum(np.trace(Ts[g] @ C[g]).real for g in labels))
    dual_value = float(np.trace(Xs).real)
    slack = np.eye(k) - sum(Ts.values())
    Tn = dict(Ts)
    Tn[labels[0]] = Tn[labels[0]] + slack
    opn = lambda M: float(np.linalg.norm(M, 2))  # noqa: E731
    diag = {
        "gap": abs(omega - dual_value),
        "solver_gap": sol.gap,
        "slackness_left": max(opn(Ts[g] @ Xs - Ts[g] @ C[g]) for g in labels),
        "slackness_right": max(opn(Xs @ Ts[g] - C[g] @ Ts[g]) for g in labels),
        "dual_feasibility": min(float(np.linalg.eigvalsh(Xs - C[g]).min()) for g in labels),
        "primal_psd": min(float(np.linalg.eigvalsh(Ts[g]).min()) for g in labels),
        "normalization_slack": float(np.trace(slack).real),
        "normalized_objective": float(sum(np.trace(Tn[g] @ C[g]).real for g in labels)),
        "support_dim": k,
    }
    diag["slackness"] = max(diag["slackness_left"], diag["slackness_right"])
    lift = lambda M: Us @ M @ Us.conj().T  # noqa: E731
    outside = np.eye(n) - Us @ Us.conj().T
    T_full = {g: lift(Tn[g]) for g in labels}
    T_full[labels[0]] = T_full[labels[0]] + outside
    return ConsolidationResult(
        T_full, {g: lift(Ts[g]) for g in labels}, lift(Xs), omega, dual_value, diag
    )


def improved_submeasurement(T: Mapping, A: Mapping, functions: Mapping, points: Mapping | None = None) -> SubMeasurement:
    """S^g = E_v A_v^{g(v)} T^g A_v^{g(v)}; invariants checked on construction."""
    if points is None:
        pts = list(A)
        points = {v: 1 / len(pts) for v in pts}
    S = {}
    for g, Tg in T.items():
        fg = functions[g]
        acc = 0
        for v, p in points.items():
            Av = A[v][fg[v]]
            acc = acc + p * (Av @ Tg @ Av)
        S[g] = (acc + acc.conj().T) / 2
    return SubMeasurement(S)


def average_operator(A: Mapping, fg, points: Mapping) -> np.ndarray:
    """A^g = E_v A_v^{g(v)}."""
    return sum(p * A[v][fg[v]] for v, p in points.items())


CLAIM_CONSTANT = 2 + math.sqrt(2)
STATED_CONSTANT = 2.0


@dataclass
class ConsolidationAudit:
    omega: float
    trace_S: float
    delta_hat: float
    gap: float
    slackness: float
    margin: float
    stated_margin: float
    submeasurement_ok: bool
    result: ConsolidationResult = field(repr=False)
    S: SubMeasurement = field(repr=False)

    @property
    def passes(self) -> bool:
        return self.margin >= -1e-7 and self.submeasurement_ok

    def as_dict(self) -> dict:
        return {
            "omega": self.omega,
            "trace_S": self.trace_S,
            "delta_hat": self.delta_hat,
            "gap": self.gap,
            "slackness": self.slackness,
            "margin": self.margin,
            "stated_margin": self.stated_margin,
            "constant": CLAIM_CONSTANT,
            "passes": self.passes,
        }


def consolidation_audit(
    state: MultiRegisterState, A: Mapping, functions: Mapping, points: Mapping | None = None, tol: float = DEFAULT_TOL
) -> ConsolidationAudit:
    """Run the SDP on Ā^g = bar(E_v A_v^{g(v)}) and audit Tr_ρ(S) >= ω - c√δ̂.

    c = 2 + √2 comes from two Cauchy-Schwarz steps on the canonical
    purification of ρ, each paying the square root of its self-inconsistency
    (at most 2δ̂); the margin against c = 2 is reported alongside.
    """
    if points is None:
        pts = list(A)
        points = {v: 1 / len(pts) for v in pts}
    rho = state.reduced_density([0])
    Abar = {g: bar(average_operator(A, fg, points), rho) for g, fg in functions.items()}
    res = consolidation_sdp(rho, Abar, tol)
    try:
        S = improved_submeasurement(res.T, A, functions, points)
        ok = True
    except InvariantError:
        S, ok = None, False
    trace_S = float(trace_rho(S.total(), state).real) if S is not None else float("nan")
    dh = max(self_consistency(A, state, list(points)), 0.0)
    return ConsolidationAudit(
        res.omega,
        trace_S,
        dh,
        res.diagnostics["gap"],
        res.diagnostics["slackness"],
        trace_S - (res.omega - CLAIM_CONSTANT * math.sqrt(dh)),
        trace_S - (res.omega - STATED_CONSTANT * math.sqrt(dh)),
        ok,
        res,
        S,
    )


# ---------------------------------------------------------------------------
# two-player XOR games


@dataclass
class XorSdpResult:
    bias: float
    value: float
    gram: np.ndarray
    questions: tuple


def xor_coefficients(game: Game):
    """Per round: (weight, q1, q2, correlation coefficient, constant part)."""
    if game.r != 2:
        raise InvalidGame("the XOR SDP handles two-player games")
    out = []
    for rnd, w in game.rounds():
        q1, q2 = rnd.questions
        if rnd.auto_accept:
            out.append((float(w), q1, q2, 0.0, 1.0))
            continue
        acc = {(a, b): bool(game.check(rnd, (a, b))) for a in (0, 1) for b in (0, 1)}
        if acc[0, 0] != acc[1, 1] or acc[0, 1] != acc[1, 0]:
            raise InvalidGame(f"predicate at {rnd.questions} depends on more than the parity")
        eq, ne = acc[0, 0], acc[0, 1]
        out.append((float(w), q1, q2, float(eq) - float(ne), float(eq) + float(ne) - 1.0))
    return out


def xor_bias_sdp_2player(game: Game, tol: float = DEFAULT_TOL) -> XorSdpResult:
    """max Σ π c <u_q1, v_q2> over unit vectors, as an SDP on the Gram matrix."""
    if not game.xor:
        raise InvalidGame("game is not flagged as XOR")
    coeffs = xor_coefficients(game)
    Q1 = list(dict.fromkeys(q1 for _, q1, _, _, _ in coeffs))
    Q2 = list(dict.fromkeys(q2 for _, _, q2, _, _ in coeffs))
    n = len(Q1) + len(Q2)
    C = np.zeros((n, n))
    const = 0.0
    for w, q1, q2, c, k in coeffs:
        i, j = Q1.index(q1), len(Q1) + Q2.index(q2)
        C[i, j] += w * c / 2
        C[j, i] += w * c / 2
        const += w * k
    rows = []
    for i in range(n):
        E = np.zeros((n, n))
        E[i, i] = 1
        rows.append(([(0, E)], "==", 1.0))
    sol = solve_sdp(SdpProblem([n], [(0, C)], rows), tol)
    bias = sol.primal_value + const
    return XorSdpResult(bias, (1 + bias) / 2, sol.blocks[0], (tuple(Q1), tuple(Q2)))


def classical_xor_bias(game: Game) -> float:
    """Brute force over ±1 assignments: Σ π c a_q1 b_q2 + constants, maximised."""
    coeffs = xor_coefficients(game)
    Q1 = list(dict.fromkeys(q1 for _, q1, _, _, _ in coeffs))
    Q2 = list(dict.fromkeys(q2 for _, _, q2, _, _ in coeffs))
    const = sum(w * k for w, _, _, _, k in coeffs)
    best = -math.inf
    for signs in itertools.product((1, -1), repeat=len(Q1)):
        a = dict(zip(Q1, signs))
        col = {q: 0.0 for q in Q2}
        for w, q1, q2, c, _ in coeffs:
            col[q2] += w * c * a[q1]
        best = max(best, sum(abs(v) for v in col.values()))
    return best + const


# ---------------------------------------------------------------------------
# see-saw


@dataclass
class SeesawResult:
    value: float
    strategy: QuantumStrategy
    history: list
    restarts: list


def _question_sets(game: Game, rounds):
    qs = [dict() for _ in range(game.r)]
    for rnd, _ in rounds:
        for i, q in enumerate(rnd.questions):
            if q is not None:
                qs[i].setdefault(q, None)
    return [list(d) for d in qs]


def _accepted(game: Game, rounds, alphabet):
    out = []
    for rnd, w in rounds:
        queried = rnd.queried
        acc = []
        for combo in itertools.product(range(len(alphabet)), repeat=len(queried)):
            ans = [None] * game.r
            for p, a in zip(queried, combo):
                ans[p] = alphabet[a]
            if game.accepts(rnd, tuple(ans)):
                acc.append(combo)
        out.append((rnd, float(w), queried, acc))
    return out


def _apply_others(psi, povms, rnd, skip, alphabet):
    """ψ with every queried player except ``skip`` measured; answer axes appended in player order."""
    x = psi
    players = []
    for j in rnd.queried:
        if j == skip:
            continue
        ops = povms[j][rnd.questions[j]]
        stack = np.stack([ops[a] for a in alphabet])
        x = np.tensordot(x, stack, axes=([j], [2]))
        x = np.moveaxis(x, -1, j)
        players.append(j)
    return x, players


def _effective(psi, povms, prepared, player, alphabet, questions):
    """B_q^a with value = Σ_q Σ_a Tr(A_q^a B_q^a)."""
    d = psi.shape[player]
    na = len(alphabet)
    B = {q: np.zeros((na, d, d), dtype=complex) for q in questions}
    r = psi.ndim
    for rnd, w, queried, acc in prepared:
        if player not in queried:
            continue
        x, others = _apply_others(psi, povms, rnd, player, alphabet)
        # x has register axes 0..r-1 followed by one answer axis per other player
        xm = np.moveaxis(x, player, 0)
        pm = np.moveaxis(psi, player, 0)
        # M[a_others] = Σ_rest x[l, rest, a] conj(psi[k, rest])
        M = np.tensordot(xm, pm.conj(), axes=(list(range(1, r)), list(range(1, r))))
        # M axes: l, a_others..., k
        M = np.moveaxis(M, -1, 1)  # l, k, a_others...
        pos = queried.index(player)
        for combo in acc:
            a_self = combo[pos]
            other = tuple(c for t, c in enumerate(combo) if t != pos)
            B[rnd.questions[player]][a_self] += w * M[(slice(None), slice(None)) + other]
    return B


def _best_povm(B: np.ndarray) -> list:
    """argmax_A Σ_a Tr(A^a B^a) over POVMs: eigenprojection for two outcomes, SDP otherwise."""
    na, d, _ = B.shape
    Bh = [(b + b.conj().T) / 2 for b in B]
    if na == 2:
        w, v = np.linalg.eigh(Bh[0] - Bh[1])
        P = v[:, w > 0]
        A0 = P @ P.conj().T
        return [A0, np.eye(d) - A0]
    prob = SdpProblem(
        [2 * d] * na,
        [(a, embed(Bh[a]).real / 2) for a in range(na)],
        lmis=[([(a, 1.0) for a in range(na)], "==", np.eye(2 * d))],
    )
    sol = solve_sdp(prob)
    els = [unembed(x) for x in sol.blocks]
    return [(e + e.conj().T) / 2 for e in els]


def _game_value(psi, povms, prepared, alphabet) -> float:
    total = 0.0
    for rnd, w, queried, acc in prepared:
        if rnd.auto_accept:
            total += w
            continue
        x, players = _apply_others(psi, povms, rnd, None, alphabet)
        amp = np.tensordot(psi.conj(), x, axes=(list(range(psi.ndim)), list(range(psi.ndim))))
        amp = np.asarray(amp)
        total += w * sum(float(np.real(amp[c])) for c in acc)
    return total


def _best_state(povms, prepared, alphabet, dims):
    D = int(np.prod(dims))
    W = np.zeros((D, D), dtype=complex)
    eye = np.eye(D, dtype=complex).reshape(tuple(dims) + (D,))
    for rnd, w, queried, acc in prepared:
        if rnd.auto_accept:
            W += w * np.eye(D)
            continue
        # columns of the identity pushed through the measured operators
        x = eye
        for j in queried:
            ops = povms[j][rnd.questions[j]]
            stack = np.stack([ops[a] for a in alphabet])
            x = np.tensordot(x, stack, axes=([j], [2]))
            x = np.moveaxis(x, -1, j)
        # x: registers..., D, answers...
        x = np.moveaxis(x, len(dims), -1)
        for c in acc:
            W += w * x[(slice(None),) * len(dims) + c + (slice(None),)].reshape(D, D)
    W = (W + W.conj().T) / 2
    vals, vecs = np.linalg.eigh(W)
    return vecs[:, -1].reshape(dims), float(vals[-1])


def _random_split(d: int, alphabet, rng) -> dict:
    """Projective measurement on a random basis, every outcome nonempty when d >= |alphabet|."""
    u = random_unitary(d, rng)
    labels = rng.permutation(d) % len(alphabet)
    els = {a: np.zeros((d, d), dtype=complex) for a in alphabet}
    for i, lab in enumerate(labels):
        els[alphabet[lab]] += np.outer(u[:, i], u[:, i].conj())
    return els


def seesaw_lower_bound(
    game: Game,
    dims: Sequence[int],
    restarts: int = 5,
    iters: int = 50,
    seed: int = 0,
    init: QuantumStrategy | None = None,
    tol: float = 1e-10,
) -> SeesawResult:
    """Alternating optimisation of each player's POVMs and the shared state.

    Every step solves its subproblem exactly, so the value never decreases
    within a run; this is asserted after every sweep.
    """
    from .rng import stream

    dims = tuple(int(d) for d in dims)
    if len(dims) != game.r:
        raise InputError("need one register dimension per player")
    if int(np.prod(dims)) > 256:
        raise TooLarge("see-saw state dimension above 256")
    if game.answer_alphabet is None:
        raise InputError("see-saw needs a finite answer alphabet")
    alphabet = list(game.answer_alphabet)
    rounds = game.rounds()
    prepared = _accepted(game, rounds, alphabet)
    questions = _question_sets(game, rounds)
    best = None
    summaries = []
    runs = 1 if init is not None else restarts
    for run in range(runs):
        rng = stream(seed, "seesaw", run)
        if init is not None:
            psi = init.state.reshape(init.dims).astype(complex)
            if init.dims != dims:
                raise InputError("initial strategy dimensions differ from dims")
            povms = [{q: [init.povms[i][q][a] for a in alphabet] for q in questions[i]} for i in range(game.r)]
            povms = [{q: dict(zip(alphabet, v)) for q, v in fam.items()} for fam in povms]
        else:
            g = rng.normal(size=dims) + 1j * rng.normal(size=dims)
            psi = g / np.linalg.norm(g)
            povms = [{q: _random_split(dims[i], alphabet, rng) for q in questions[i]} for i in range(game.r)]
        history = [_game_value(psi, povms, prepared, alphabet)]
        for _ in range(iters):
            for i in range(game.r):
                B = _effective(psi, povms, prepared, i, alphabet, questions[i])
                for q in questions[i]:
                    els = _best_povm(B[q])
                    povms[i][q] = dict(zip(alphabet, els))
            psi, _ = _best_state(povms, prepared, alphabet, dims)
            val = _game_value(psi, povms, prepared, alphabet)
            if val < history[-1] - 1e-7:
                raise InvariantError(f"see-saw value decreased from {history[-1]} to {val}")
            history.append(val)
            if val - history[-2] < tol:
                break
        summaries.append(history[-1])
        if best is None or history[-1] > best[0]:
            best = (history[-1], psi.copy(), [dict(f) for f in povms], history)
    value, psi, povms, history = best
    strat = QuantumStrategy(dims, psi.reshape(-1), povms, validate=False)
    return SeesawResult(value, strat, history, summaries)


# ---------------------------------------------------------------------------
# renormalised state after removing a sub-measurement


@dataclass
class RenormalizedState:
    state: MultiRegisterState
    z: float
    delta: float
    mass: float
    residual: float
    residual_bound: float
    z2_floor: float

    @property
    def holds(self) -> bool:
        return self.residual <= self.residual_bound + 1e-12 and self.z**2 >= self.z2_floor - 1e-12

    def as_dict(self) -> dict:
        return {
            "z": self.z,
            "delta": self.delta,
            "mass": self.mass,
            "residual": self.residual,
            "residual_bound": self.residual_bound,
            "z2_floor": self.z2_floor,
            "holds": self.holds,
        }


def renormalized_state(state: MultiRegisterState, R: np.ndarray) -> RenormalizedState:
    """|Φ> = (Id-R)^{⊗r}|Ψ>/z with both norm estimates checked.

    residual = ‖(Id-R)^{⊗r}Ψ - (Id^{⊗(r-1)} ⊗ (Id-R))Ψ‖², bounded by r²δ with
    δ = <R, Id-R>; z² is bounded below by 1 - <R, Id> - 3r√δ.
    """
    from .quantumlab import pairwise_form

    R = np.asarray(R, dtype=complex)
    d, r = state.dim, state.r
    if R.shape != (d, d):
        raise DimensionMismatch(f"R has shape {R.shape}, registers have dimension {d}")
    w = np.linalg.eigvalsh((R + R.conj().T) / 2)
    if w.min() < -1e-10 or w.max() > 1 + 1e-10:
        raise InvariantError(f"R must satisfy 0 <= R <= Id (eigenvalues in [{w.min():.3e}, {w.max():.3e}])")
    comp = np.eye(d) - R
    full = state.tensor
    for k in range(r):
        full = state.apply(comp, k, full)
    last = state.apply(comp, r - 1)
    residual = float(np.linalg.norm(full - last) ** 2)
    z = float(np.linalg.norm(full))
    delta = max(float(pairwise_form(R, comp, state).real), 0.0)
    mass = float(pairwise_form(R, np.eye(d), state).real)
    if z == 0:
        raise InvariantError("(Id-R)^{⊗r} annihilates the state")
    phi = MultiRegisterState(r, d, full / z)
    return RenormalizedState(phi, z, delta, mass, residual, r * r * delta, 1 - mass - 3 * r * math.sqrt(delta))

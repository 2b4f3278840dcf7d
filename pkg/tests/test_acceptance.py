"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line."""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from click.testing import CliRunner

from nlgames.cli import main as cli_main
from nlgames.field import make_field
from nlgames.gameio import dump_operators
from nlgames.gamecore import (
    QuantumStrategy,
    TableGame,
    chsh_game,
    classical_value_bruteforce,
    evaluate_deterministic,
    evaluate_quantum,
    monte_carlo_value,
    symmetrize,
)
from nlgames.optim import consolidation_audit, xor_bias_sdp_2player
from nlgames.polyalg import (
    MultiPoly,
    low_degree_extension,
    random_poly,
    sharp_apply,
    substitute_vars,
    zero_fraction,
)
from nlgames.protocols import (
    LinearityTest,
    LinearStrategy,
    LowDegreeParams,
    PlanePointTest,
    QuadeqInstance,
    QuadeqTest,
    SatTest,
    TwoLevelTest,
    formula_with_violation,
    honest_ld_strategy,
    honest_quadeq_strategy,
    honest_sat_strategy,
    planted_3sat,
)
from nlgames.protocols.sat import expected_rejection
from nlgames.quantumlab import (
    SubMeasurement,
    basis_measurement,
    chsh_strategy,
    closeness_from_consistency,
    consistency_metrics,
    random_projective,
    random_unitary,
    rotated_measurement,
    schmidt_diagonal_state,
    self_consistency,
    symmetric_state,
)
from nlgames.reductions import (
    AssignmentAnswers,
    ClauseVariableGame,
    LiftedStrategy,
    LongCodeStrategy,
    binarize_game,
    predicate_to_quadeq,
    satisfying_pairs,
    xor_gadget,
)
from nlgames.rng import stream

MC_ROUNDS = 10**5
EXACT_ZERO = 1e-12


def test_criterion_01_chsh_classical(criterion):
    t = time.perf_counter()
    value = classical_value_bruteforce(chsh_game())
    dt = time.perf_counter() - t
    ok = value == Fraction(3, 4) and dt < 1
    criterion(1, ok, f"classical CHSH value {value} in {dt:.3f}s")
    assert ok


def test_criterion_02_chsh_quantum(criterion):
    t = time.perf_counter()
    value = evaluate_quantum(chsh_game(), chsh_strategy())
    bias = xor_bias_sdp_2player(chsh_game()).bias
    dt = time.perf_counter() - t
    err_v = abs(value - (0.5 + math.sqrt(2) / 4))
    err_b = abs(bias - math.sqrt(2) / 2)
    ok = err_v <= 1e-9 and err_b <= 1e-6 and dt < 10
    criterion(2, ok, f"value {value:.12f} (err {err_v:.1e}), SDP bias {bias:.9f} (err {err_b:.1e}) in {dt:.2f}s")
    assert ok


def _planted_quadeq(rng, n_chunk=3, n_aux=2, n_eq=6):
    n = 2 * n_chunk + n_aux
    x = int(rng.integers(0, 1 << n))
    eqs = []
    for _ in range(n_eq):
        k = int(rng.integers(1, 5))
        pairs = {tuple(sorted(int(v) for v in rng.integers(0, n, size=2))) for _ in range(k)}
        value = sum((x >> i) & (x >> j) & 1 for i, j in pairs) & 1
        eqs.append((tuple(pairs), value))
    inst = QuadeqInstance(n_chunk, tuple(eqs), n_aux)
    assert inst.satisfied_by(x)
    return inst, x


@pytest.mark.slow
def test_criterion_03_completeness(criterion):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    parts = {}

    F5 = make_field(5)
    g = random_poly(F5, 2, 2, rng)
    pp = PlanePointTest(LowDegreeParams(2, 2, 3, 5))
    parts["plane-point"] = evaluate_deterministic(pp, honest_ld_strategy(g, 2))

    g1 = random_poly(F5, 2, 1, rng)
    tl = TwoLevelTest(LowDegreeParams(1, 2, 3, 5))
    parts["two-level"] = evaluate_deterministic(tl, honest_ld_strategy(g1, 1))

    cnf, asg = planted_3sat(20, 60, rng)
    sat = SatTest(cnf, 3, make_field(97))
    res = monte_carlo_value(sat, honest_sat_strategy(cnf, asg, params=sat.params), MC_ROUNDS, seed=31)
    parts["3-sat"] = Fraction(res.accepted, res.rounds)

    lin = LinearityTest(4)
    parts["linearity"] = evaluate_deterministic(lin, LinearStrategy(0b1011))

    inst, x = _planted_quadeq(rng)
    res = monte_carlo_value(QuadeqTest(inst), honest_quadeq_strategy(inst, x), MC_ROUNDS, seed=32)
    parts["quadeq"] = Fraction(res.accepted, res.rounds)

    dt = time.perf_counter() - t0
    ok = all(v == 1 for v in parts.values()) and dt < 300
    detail = ", ".join(f"{k}={v}" for k, v in parts.items())
    criterion(3, ok, f"{detail} in {dt:.0f}s")
    assert ok


@pytest.mark.slow
def test_criterion_04_xor_gadget(criterion):
    cnf, asg = planted_3sat(6, 8, np.random.default_rng(4))
    binary = binarize_game(ClauseVariableGame(cnf))
    lifted = LiftedStrategy(binary, AssignmentAnswers(cnf, asg))
    lines, ok = [], True
    for k, eps in enumerate((0.0, 0.05, 0.2)):
        game = xor_gadget(binary, eps, K=1, K2=1)
        res = monte_carlo_value(game, LongCodeStrategy(lifted.answer), MC_ROUNDS, seed=40 + k)
        sigma = math.sqrt(eps * (1 - eps) / MC_ROUNDS)
        dev = abs(res.estimate - (1 - eps))
        good = dev <= 3 * sigma if eps > 0 else res.accepted == res.rounds
        ok &= good
        lines.append(f"eps={eps}: {res.estimate:.5f} (|dev| {dev:.5f} vs 3σ {3 * sigma:.5f})")
    criterion(4, ok, "; ".join(lines))
    assert ok


@pytest.mark.slow
def test_criterion_05_soundness_smoke(criterion):
    rng = np.random.default_rng(5)
    lines, ok = [], True
    for k, gamma in enumerate((0.1, 0.5)):
        clauses = 40
        cnf, asg = formula_with_violation(20, clauses, int(round(gamma * clauses)), rng)
        assert abs(cnf.violated_fraction(asg) - gamma) < 1e-12
        sat = SatTest(cnf, 3, make_field(97))
        res = monte_carlo_value(sat, honest_sat_strategy(cnf, asg, params=sat.params), MC_ROUNDS, seed=50 + k)
        p = expected_rejection(cnf, asg)
        rej = 1 - res.estimate
        sigma = math.sqrt(p * (1 - p) / MC_ROUNDS)
        good = abs(rej - gamma / 4) <= 3 * sigma
        ok &= good
        lines.append(f"gamma={gamma}: rejection {rej:.5f} vs {gamma / 4:.5f} ± {3 * sigma:.5f}")
    criterion(5, ok, "; ".join(lines))
    assert ok


def test_criterion_06_polynomial_core(criterion):
    rng = np.random.default_rng(6)
    F = make_field(101)
    sharp_ok = True
    for d in (1, 2, 3, 7):
        for _ in range(1000):
            nv = int(rng.integers(1, 3))
            g = MultiPoly(F, nv, {tuple(int(e) for e in rng.integers(0, d + 1, size=nv)): int(rng.integers(1, 101)) for _ in range(4)})
            x = tuple(int(v) for v in rng.integers(0, 101, size=nv))
            sharp_ok &= g(x) == substitute_vars(g, d)(sharp_apply(d, x, F))

    lde_ok = True
    for h, m in ((1, 3), (2, 2), (3, 2)):
        grid = rng.integers(0, 101, size=(h + 1,) * m)
        P = low_degree_extension(grid, h, m, F)
        lde_ok &= all(k <= h for k in P.individual_degrees())
        lde_ok &= all(P(idx) == grid[idx] for idx in np.ndindex(*grid.shape))

    sz_ok = True
    for q, m, d in ((5, 2, 1), (5, 2, 3), (7, 2, 4), (5, 3, 2), (3, 3, 2)):
        for _ in range(20):
            P = random_poly(make_field(q), m, d, rng)
            if P.is_zero():
                continue
            sz_ok &= zero_fraction(P) <= Fraction(max(P.total_degree, 0), q)
    ok = sharp_ok and lde_ok and sz_ok
    criterion(6, ok, f"#-substitution {sharp_ok}, LDE grid/degree {lde_ok}, Schwartz-Zippel {sz_ok}")
    assert ok


def test_criterion_07_reduction_equivalence(criterion):
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(100):
        m = int(rng.integers(1, 3))
        size = 1 << m
        table = rng.random((size, size)) < rng.uniform(0.1, 0.9)
        accept = {(a, b) for a in range(size) for b in range(size) if table[a, b]}
        arith = predicate_to_quadeq(accept, m)
        if satisfying_pairs(arith) != accept:
            bad += 1
    criterion(7, bad == 0, f"{100 - bad}/100 random predicates give identical satisfying sets")
    assert bad == 0


def test_criterion_08_sdp_lab(criterion):
    rng = stream(8, "criterion-8")
    t = time.perf_counter()
    worst = {"gap": 0.0, "slackness": 0.0, "margin": math.inf, "stated_margin": math.inf}
    sub_ok = True
    for _ in range(50):
        d = int(rng.integers(2, 7))
        state = symmetric_state(3, d, rng)
        points = list(range(int(rng.integers(2, 5))))
        A = {v: random_projective(d, [0, 1, 2], rng) for v in points}
        G = {g: {v: int(rng.integers(0, 3)) for v in points} for g in range(int(rng.integers(1, 5)))}
        audit = consolidation_audit(state, A, G)
        sub_ok &= audit.submeasurement_ok
        worst["gap"] = max(worst["gap"], audit.gap)
        worst["slackness"] = max(worst["slackness"], audit.slackness)
        worst["margin"] = min(worst["margin"], audit.margin)
        worst["stated_margin"] = min(worst["stated_margin"], audit.stated_margin)
    dt = time.perf_counter() - t
    ok = worst["gap"] <= 1e-6 and worst["slackness"] <= 1e-5 and sub_ok and worst["margin"] >= -1e-7 and dt < 300
    criterion(
        8,
        ok,
        f"max gap {worst['gap']:.1e}, max slackness {worst['slackness']:.1e}, S valid {sub_ok}, "
        f"min audit margin {worst['margin']:.3f} (constant 2: {worst['stated_margin']:.3f}) in {dt:.0f}s",
    )
    assert ok


def test_criterion_09_consistency_metrics(criterion):
    rng = np.random.default_rng(9)
    zero_ok = True
    for r, d in ((2, 2), (3, 2), (3, 3), (2, 4)):
        state = schmidt_diagonal_state(r, np.ones(d))
        A = {v: basis_measurement(d) for v in range(3)}
        M = SubMeasurement({(a, a, a): A[0][a] for a in range(d)})
        rep = consistency_metrics(M, A, state)
        zero_ok &= max(abs(rep.delta), abs(rep.gamma), abs(rep.eta)) <= EXACT_ZERO
        zero_ok &= abs(self_consistency(A, state)) <= EXACT_ZERO

    close_ok = True
    for _ in range(100):
        d = int(rng.integers(2, 4))
        state = symmetric_state(3, d, rng)
        A = random_projective(d, list(range(d)), rng)
        B = rotated_measurement(A, float(rng.uniform(0, 0.6)), rng)
        close_ok &= closeness_from_consistency(A, B, state).holds
    ok = zero_ok and close_ok
    criterion(9, ok, f"exact zeros {zero_ok}, closeness bound on 100 instances {close_ok}")
    assert ok


def _random_symmetric_game(rng):
    nq = int(rng.integers(1, 3))
    qs = [(a, b) for a in range(nq) for b in range(nq)]
    w = {q: int(rng.integers(1, 4)) for q in qs}
    for a, b in qs:
        w[(b, a)] = w[(a, b)]
    total = sum(w.values())
    acc = set()
    for a, b in qs:
        for x in (0, 1):
            for y in (0, 1):
                if (a, b, x, y) in acc or rng.random() < 0.5:
                    acc.add((a, b, x, y))
                    acc.add((b, a, y, x))
    accept = [((a, b), (x, y)) for a, b, x, y in acc]
    dist = [(q, Fraction(w[q], total)) for q in qs]
    return TableGame(2, dist, answers=(0, 1), accept=accept, symmetric=True), nq


def test_criterion_10_symmetrization(criterion):
    rng = np.random.default_rng(10)
    worst_v, worst_s = 0.0, 0.0
    for _ in range(10):
        game, nq = _random_symmetric_game(rng)
        dims = (2, int(rng.integers(2, 4)))
        psi = rng.normal(size=int(np.prod(dims))) + 1j * rng.normal(size=int(np.prod(dims)))
        povms = []
        for d in dims:
            fam = {}
            for q in range(nq):
                U = random_unitary(d, rng)
                P = U[:, :1] @ U[:, :1].conj().T
                fam[q] = {0: P, 1: np.eye(d) - P}
            povms.append(fam)
        qs = QuantumStrategy(dims, psi / np.linalg.norm(psi), povms)
        sym = symmetrize(game, qs)
        worst_v = max(worst_v, abs(evaluate_quantum(game, sym) - evaluate_quantum(game, qs)))
        t = sym.state.reshape(sym.dims)
        worst_s = max(worst_s, float(np.abs(t - t.T).max()))
    ok = worst_v <= 1e-9 and worst_s <= 1e-10
    criterion(10, ok, f"max value change {worst_v:.1e}, max swap residual {worst_s:.1e}")
    assert ok


def test_criterion_11_cli_determinism(criterion, tmp_path):
    runner = CliRunner()
    cnf = tmp_path / "tiny.cnf"
    cnf.write_text("p cnf 3 2\n1 2 3 0\n-1 2 -3 0\n")
    rng = np.random.default_rng(11)
    state = symmetric_state(3, 2, rng)
    A = {v: random_projective(2, [0, 1], rng) for v in range(2)}
    bundle = tmp_path / "ops.txt"
    bundle.write_text(dump_operators(state, {"A": A}, {"functions": [(0, 0), (1, 0), (0, 1)]}))
    runs = {
        "compile": ["compile", str(cnf), "--stage", "xor", "--samples", "32"],
        "eval-honest": ["eval", str(tmp_path / "compile" / "game.json"), "--honest", "--witness", "110", "--rounds", "500"],
        "eval-quantum": ["eval", "chsh", "--quantum", "canned:chsh", "--exact"],
        "eval-brute": ["eval", "chsh", "--brute-classical"],
        "metrics": ["metrics", str(bundle), "--consolidate"],
    }
    results = {}
    for name, args in runs.items():
        out = tmp_path / name
        res = runner.invoke(cli_main, args + ["--out", str(out)])
        assert res.exit_code == 0, res.output
        rep = runner.invoke(cli_main, ["replay", str(out / "manifest.json")])
        results[name] = rep.exit_code == 0 and "bit-identical" in rep.output
        manifest = json.loads((out / "manifest.json").read_text())
        results[name] &= set(manifest["outputs"]) >= {"report.txt", "report.json"}
    ok = all(results.values())
    criterion(11, ok, ", ".join(f"{k}={'identical' if v else 'DIFFERS'}" for k, v in results.items()))
    assert ok

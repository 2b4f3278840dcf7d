"""Text formats for game tables, strategies and operator bundles.

Question and answer labels are written as Python literals (``repr``) and read
back with :func:`ast.literal_eval`, which covers ints, strings, bytes, None
and nested tuples.  Fields are tab separated.  Floating-point numbers are
written with 17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import ast
import itertools
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InputError, TooLarge
from .gamecore import NAMED_CHECKERS, DeterministicStrategy, Game, QuantumStrategy, Round, TableGame
from .quantumlab import MultiRegisterState, SubMeasurement

GAME_MAGIC = "nlgames-game 1"
STRATEGY_MAGIC = "nlgames-strategy 1"
OPERATORS_MAGIC = "nlgames-operators 1"
ACCEPT_CAP = 10**6


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _lit(s: str):
    try:
        return ast.literal_eval(s)
    except (ValueError, SyntaxError):
        raise InputError(f"cannot parse label {s!r}") from None


def _lines(text: str):
    for raw in text.splitlines():
        line = raw.rstrip("\n")
        if line.strip() and not line.startswith("#"):
            yield line


# ---------------------------------------------------------------------------
# game tables


def dump_game(game: Game, checker: str | None = None, cap: int = ACCEPT_CAP) -> str:
    """Explicit table: header, question and answer labels, π rows, then V.

    V is either ``V checker <name>`` (a predicate from NAMED_CHECKERS on
    question and answer tuples) or one ``row a1 … ar`` line per accepted
    answer tuple, with answers given as indices into the answer list.
    """
    if game.answer_alphabet is None:
        raise InputError("table output needs a finite answer alphabet")
    rounds = game.rounds()
    answers = list(game.answer_alphabet)
    qindex: dict = {}
    for rnd, _ in rounds:
        for q in rnd.questions:
            if q is not None:
                qindex.setdefault(q, len(qindex))
    flags = [f for f, on in (("xor", game.xor), ("symmetric", game.symmetric)) if on] or ["-"]
    out = [
        GAME_MAGIC,
        f"header\t{game.r}\t{len(qindex)}\t{len(answers)}\t{','.join(flags)}",
        f"name\t{game.name}",
    ]
    out += [f"Q\t{q!r}" for q in qindex]
    out += [f"A\t{a!r}" for a in answers]
    out.append(f"pi\t{len(rounds)}")
    for rnd, w in rounds:
        cells = ["-" if q is None else str(qindex[q]) for q in rnd.questions]
        out.append("\t".join(cells + [f"{w.numerator}/{w.denominator}"]))
    if checker is not None:
        if checker not in NAMED_CHECKERS:
            raise InputError(f"unknown checker {checker!r}")
        out.append(f"V\tchecker\t{checker}")
        return "\n".join(out) + "\n"
    out.append("V\taccepted")
    work = 0
    for row, (rnd, _) in enumerate(rounds):
        queried = rnd.queried
        work += len(answers) ** len(queried)
        if work > cap:
            raise TooLarge(f"accepted-tuple enumeration exceeds cap {cap}")
        for combo in itertools.product(range(len(answers)), repeat=len(queried)):
            ans = [None] * game.r
            for p, a in zip(queried, combo):
                ans[p] = answers[a]
            if game.accepts(rnd, tuple(ans)):
                cells = ["-"] * game.r
                for p, a in zip(queried, combo):
                    cells[p] = str(a)
                out.append("\t".join([str(row)] + cells))
    return "\n".join(out) + "\n"


def load_game(text: str) -> TableGame:
    lines = list(_lines(text))
    if not lines or lines[0] != GAME_MAGIC:
        raise InputError("not a game table file")
    try:
        _, r, nq, na, flags = lines[1].split("\t")
        r, nq, na = int(r), int(nq), int(na)
        name = lines[2].split("\t", 1)[1]
        pos = 3
        Q = [_lit(lines[pos + i].split("\t", 1)[1]) for i in range(nq)]
        pos += nq
        A = [_lit(lines[pos + i].split("\t", 1)[1]) for i in range(na)]
        pos += na
        tag, nrows = lines[pos].split("\t")
        if tag != "pi":
            raise InputError("missing pi block")
        pos += 1
        rows = []
        for i in range(int(nrows)):
            cells = lines[pos + i].split("\t")
            if len(cells) != r + 1:
                raise InputError(f"pi row {i} has {len(cells)} fields")
            qs = tuple(None if c == "-" else Q[int(c)] for c in cells[:r])
            rows.append((qs, Fraction(cells[r])))
        pos += int(nrows)
        vline = lines[pos].split("\t")
    except (IndexError, ValueError) as exc:
        raise InputError(f"malformed game table: {exc}") from None
    flagset = set(flags.split(","))
    if vline[0] != "V":
        raise InputError("missing V block")
    if vline[1] == "checker":
        if vline[2] not in NAMED_CHECKERS:
            raise InputError(f"unknown checker {vline[2]!r}")
        pred = NAMED_CHECKERS[vline[2]]
        dist = [(Round(qs, row), w) for row, (qs, w) in enumerate(rows)]
        game = TableGame(
            r, dist, answers=A, checker=lambda rnd, a: pred(rnd.questions, tuple(a)),
            xor="xor" in flagset, name=name,
        )
    else:
        accepted: dict = {}
        for line in lines[pos + 1 :]:
            cells = line.split("\t")
            try:
                row = int(cells[0])
                ans = tuple(None if c == "-" else A[int(c)] for c in cells[1:])
            except (ValueError, IndexError):
                raise InputError(f"malformed accepted line {line!r}") from None
            if len(ans) != r:
                raise InputError(f"accepted line {line!r} has wrong arity")
            accepted.setdefault(row, set()).add(ans)
        dist = [(Round(qs, row), w) for row, (qs, w) in enumerate(rows)]
        game = TableGame(
            r, dist, answers=A,
            checker=lambda rnd, a: tuple(a) in accepted.get(rnd.context, ()),
            xor="xor" in flagset, name=name,
        )
    game.symmetric = "symmetric" in flagset
    return game


# ---------------------------------------------------------------------------
# strategies and operators


def _matrix_lines(M: np.ndarray) -> list[str]:
    return ["\t".join(f"{fmt(z.real)} {fmt(z.imag)}" for z in row) for row in np.asarray(M, dtype=complex)]


def _read_matrix(lines: list[str], pos: int, d: int) -> np.ndarray:
    M = np.zeros((d, d), dtype=complex)
    for i in range(d):
        cells = lines[pos + i].split("\t")
        if len(cells) != d:
            raise InputError(f"matrix row has {len(cells)} entries, expected {d}")
        for j, c in enumerate(cells):
            re, im = c.split(" ")
            M[i, j] = complex(float(re), float(im))
    return M


def dump_deterministic(strat: DeterministicStrategy, questions: list[list]) -> str:
    """``player q a`` lines for every player and listed question."""
    out = [STRATEGY_MAGIC, "deterministic"]
    for p, qs in enumerate(questions):
        for q in qs:
            out.append(f"{p}\t{q!r}\t{strat.answer(p, q)!r}")
    return "\n".join(out) + "\n"


def dump_quantum(strat: QuantumStrategy) -> str:
    out = [STRATEGY_MAGIC, "quantum\t" + "\t".join(str(d) for d in strat.dims), "state"]
    out += [f"{fmt(z.real)} {fmt(z.imag)}" for z in strat.state]
    for p, fam in enumerate(strat.povms):
        for q, ops in fam.items():
            for a, M in ops.items():
                out.append(f"op\t{p}\t{q!r}\t{a!r}")
                out += _matrix_lines(M)
    return "\n".join(out) + "\n"


def load_strategy(text: str):
    lines = list(_lines(text))
    if not lines or lines[0] != STRATEGY_MAGIC:
        raise InputError("not a strategy file")
    kind = lines[1].split("\t")
    if kind[0] == "deterministic":
        tables: dict = {}
        for line in lines[2:]:
            cells = line.split("\t")
            if len(cells) != 3:
                raise InputError(f"malformed strategy line {line!r}")
            tables.setdefault(int(cells[0]), {})[_lit(cells[1])] = _lit(cells[2])
        r = max(tables) + 1 if tables else 0
        return DeterministicStrategy([tables.get(p, {}) for p in range(r)])
    if kind[0] == "quantum":
        dims = tuple(int(x) for x in kind[1:])
        D = int(np.prod(dims))
        if lines[2] != "state":
            raise InputError("missing state block")
        amps = [complex(*map(float, lines[3 + i].split(" "))) for i in range(D)]
        povms = [dict() for _ in dims]
        pos = 3 + D
        while pos < len(lines):
            tag, p, q, a = lines[pos].split("\t")
            p = int(p)
            povms[p].setdefault(_lit(q), {})[_lit(a)] = _read_matrix(lines, pos + 1, dims[p])
            pos += 1 + dims[p]
        return QuantumStrategy(dims, np.array(amps), povms)
    raise InputError(f"unknown strategy kind {kind[0]!r}")


def dump_operators(state: MultiRegisterState, families: dict, meta: dict | None = None) -> str:
    """State on r registers plus named families {name: {point: SubMeasurement}}.

    ``meta`` holds literal-valued extras (edges, functions, ...).
    """
    out = [OPERATORS_MAGIC, f"state\t{state.r}\t{state.dim}"]
    out += [f"{fmt(z.real)} {fmt(z.imag)}" for z in state.vector]
    for key, val in (meta or {}).items():
        out.append(f"meta\t{key}\t{val!r}")
    for name, fam in families.items():
        for point, meas in fam.items():
            for a, M in meas.elements.items():
                out.append(f"op\t{name}\t{point!r}\t{a!r}")
                out += _matrix_lines(M)
    return "\n".join(out) + "\n"


def load_operators(text: str) -> tuple[MultiRegisterState, dict, dict]:
    lines = list(_lines(text))
    if not lines or lines[0] != OPERATORS_MAGIC:
        raise InputError("not an operator bundle")
    try:
        _, r, d = lines[1].split("\t")
        r, d = int(r), int(d)
        amps = [complex(*map(float, lines[2 + i].split(" "))) for i in range(d**r)]
    except (ValueError, IndexError) as exc:
        raise InputError(f"malformed state block: {exc}") from None
    state = MultiRegisterState(r, d, np.array(amps))
    meta: dict = {}
    raw: dict = {}
    pos = 2 + d**r
    while pos < len(lines):
        cells = lines[pos].split("\t")
        if cells[0] == "meta" and len(cells) == 3:
            meta[cells[1]] = _lit(cells[2])
            pos += 1
        elif cells[0] == "op" and len(cells) == 4:
            raw.setdefault(cells[1], {}).setdefault(_lit(cells[2]), {})[_lit(cells[3])] = _read_matrix(lines, pos + 1, d)
            pos += 1 + d
        else:
            raise InputError(f"unexpected line {lines[pos]!r}")
    families = {name: {pt: SubMeasurement(els) for pt, els in fam.items()} for name, fam in raw.items()}
    return state, families, meta


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None

"""Referee protocols: low-degree, two-level, 3-SAT, linearity and QUADEQ tests."""

from __future__ import annotations

from ..gamecore import Game, TableGame, compile_rounds
from ..errors import InputError
from .cnf import CNF, formula_with_violation, parse_dimacs, planted_3sat, read_dimacs
from .linearity import (
    LinearityTest,
    LinearStrategy,
    QuadeqAssignmentStrategy,
    QuadeqInstance,
    QuadeqTest,
    honest_quadeq_strategy,
    lin_check,
    parse_quadeq,
    read_quadeq,
)
from .lowdegree import (
    HonestLowDegree,
    LowDegreeParams,
    PlanePointTest,
    PolyOracle,
    TwoLevelTest,
    honest_ld_strategy,
    ld_check,
    twolevel_check,
)
from .sat import HonestSat, SatTest, SatTestParams, clause_check, honest_sat_strategy, sat_params, variable_point

TABLE_CAP = 10**6


def build_test(kind: str, **params) -> Game:
    """Referee for ``kind`` in {plane-point, two-level, sat, linearity, quadeq}."""
    r = params.get("r", 3)
    if kind in ("plane-point", "ld"):
        return PlanePointTest(LowDegreeParams(params["d"], params["m"], r, params["q"]))
    if kind == "two-level":
        return TwoLevelTest(LowDegreeParams(params["d"], params["m"], r, params["q"]))
    if kind == "sat":
        return SatTest(params["cnf"], r, params["q"])
    if kind == "linearity":
        return LinearityTest(params["n"], r)
    if kind == "quadeq":
        return QuadeqTest(params["instance"], r)
    raise InputError(f"unknown test kind {kind!r}")


def compile_to_table(kind: str, cap: int = TABLE_CAP, **params) -> TableGame:
    """Explicit round table of a test; V delegates to the test's checker."""
    return compile_rounds(build_test(kind, **params), cap=cap)


__all__ = [
    "CNF",
    "parse_dimacs",
    "read_dimacs",
    "planted_3sat",
    "formula_with_violation",
    "LowDegreeParams",
    "PlanePointTest",
    "TwoLevelTest",
    "PolyOracle",
    "HonestLowDegree",
    "honest_ld_strategy",
    "ld_check",
    "twolevel_check",
    "SatTestParams",
    "SatTest",
    "HonestSat",
    "sat_params",
    "variable_point",
    "clause_check",
    "honest_sat_strategy",
    "LinearityTest",
    "LinearStrategy",
    "lin_check",
    "QuadeqInstance",
    "QuadeqTest",
    "QuadeqAssignmentStrategy",
    "honest_quadeq_strategy",
    "parse_quadeq",
    "read_quadeq",
    "build_test",
    "compile_to_table",
]

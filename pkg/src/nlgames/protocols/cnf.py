"""CNF formulas: DIMACS I/O and assignment bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class CNF:
    """Clauses are tuples of non-zero ints; literal k means x_k, -k means not x_k."""

    n: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for c in clauses:
            if not c:
                raise InputError("empty clause")
            if len(c) > 3:
                raise InputError(f"clause {c} has more than three literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    raise InputError(f"literal {lit} out of range for {self.n} variables")
        if not clauses:
            raise InputError("formula has no clauses")
        object.__setattr__(self, "clauses", clauses)

    def padded(self, clause) -> tuple:
        """Clause as exactly three literals (the last literal repeated)."""
        return tuple(clause) + (clause[-1],) * (3 - len(clause))

    def clause_satisfied(self, clause, assignment) -> bool:
        return any(bool(assignment[abs(l) - 1]) == (l > 0) for l in clause)

    def violated(self, assignment) -> list[int]:
        if len(assignment) != self.n:
            raise InputError(f"assignment has {len(assignment)} values for {self.n} variables")
        return [k for k, c in enumerate(self.clauses) if not self.clause_satisfied(c, assignment)]

    def violated_fraction(self, assignment) -> float:
        return len(self.violated(assignment)) / len(self.clauses)

    def satisfies(self, assignment) -> bool:
        return not self.violated(assignment)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n} {len(self.clauses)}"]
        lines += [" ".join(str(l) for l in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CNF:
    n = None
    clauses = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise InputError(f"bad problem line {line!r}")
            n = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                if current:
                    clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if n is None:
        raise InputError("missing 'p cnf' header")
    return CNF(n, tuple(clauses))


def read_dimacs(path) -> CNF:
    return parse_dimacs(Path(path).read_text())


def planted_3sat(n: int, clauses: int, rng: np.random.Generator, assignment=None) -> tuple[CNF, list[int]]:
    """Random 3-CNF satisfied by a planted assignment (returned alongside)."""
    if n < 3:
        raise InputError("need at least three variables")
    if assignment is None:
        assignment = [int(b) for b in rng.integers(0, 2, size=n)]
    out = []
    while len(out) < clauses:
        vars_ = rng.choice(n, size=3, replace=False) + 1
        signs = rng.integers(0, 2, size=3)
        clause = tuple(int(v) if s else -int(v) for v, s in zip(vars_, signs))
        if any(bool(assignment[abs(l) - 1]) == (l > 0) for l in clause):
            out.append(clause)
    return CNF(n, tuple(out)), assignment


def formula_with_violation(n: int, clauses: int, violated: int, rng: np.random.Generator):
    """3-CNF and an assignment violating exactly ``violated`` of its clauses."""
    if violated > clauses:
        raise InputError("cannot violate more clauses than exist")
    cnf, assignment = planted_3sat(n, clauses - violated, rng)
    bad = []
    for _ in range(violated):
        vars_ = rng.choice(n, size=3, replace=False) + 1
        # every literal false under the assignment
        bad.append(tuple(-int(v) if assignment[v - 1] else int(v) for v in vars_))
    allc = list(cnf.clauses) + bad
    order = rng.permutation(len(allc))
    return CNF(n, tuple(allc[k] for k in order)), assignment

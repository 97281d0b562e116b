"""Monotone CNF formulas, the M2SAT counting problem, and model counting.

`count_sat` is a brute-force enumeration oracle (guarded), and
`exact_count_cnf` builds, for any 1 <= p <= 2^l - 1, a monotone CNF over
l variables with at most l clauses and exactly p satisfying assignments
by the recursive halving construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import GuardExceeded

COUNT_SAT_GUARD = 24


@dataclass(frozen=True)
class MonotoneCNF:
    """Conjunction of disjunctions of positive literals, variables 1..num_vars."""

    num_vars: int
    clauses: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("variable count must be nonnegative")
        for clause in self.clauses:
            if not clause:
                raise ValueError("clauses must be nonempty")
            for v in clause:
                if not 1 <= v <= self.num_vars:
                    raise ValueError(f"variable {v} out of range 1..{self.num_vars}")

    def clause_masks(self) -> list[int]:
        return [sum(1 << (v - 1) for v in clause) for clause in self.clauses]

    def evaluate(self, assignment_mask: int) -> bool:
        return all(assignment_mask & m for m in self.clause_masks())

    def to_json_dict(self) -> dict:
        return {
            "n": self.num_vars,
            "clauses": [sorted(clause) for clause in self.clauses],
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "MonotoneCNF":
        return MonotoneCNF(doc["n"], tuple(frozenset(c) for c in doc["clauses"]))


@dataclass(frozen=True)
class M2SATInstance:
    """Monotone 2-CNF plus a count threshold K: is |F^-1(1)| >= K?

    Clauses are (i1, i2) index pairs; i1 == i2 and repeated clauses are
    both allowed. The clause count is capped at n^2.
    """

    n: int
    clauses: tuple[tuple[int, int], ...]
    K: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one variable")
        if len(self.clauses) > self.n**2:
            raise ValueError(f"clause count {len(self.clauses)} exceeds n^2 = {self.n ** 2}")
        for i1, i2 in self.clauses:
            if not (1 <= i1 <= self.n and 1 <= i2 <= self.n):
                raise ValueError(f"clause ({i1},{i2}) out of range 1..{self.n}")
        if not 1 <= self.K <= 2**self.n:
            raise ValueError(f"K={self.K} outside 1..2^{self.n}")

    def to_cnf(self) -> MonotoneCNF:
        return MonotoneCNF(self.n, tuple(frozenset(c) for c in self.clauses))

    def to_json_dict(self) -> dict:
        return {"n": self.n, "clauses": [list(c) for c in self.clauses], "K": self.K}

    @staticmethod
    def from_json_dict(doc: dict) -> "M2SATInstance":
        return M2SATInstance(
            doc["n"], tuple((c[0], c[1]) for c in doc["clauses"]), doc["K"]
        )


def count_sat(cnf: MonotoneCNF, guard: int = COUNT_SAT_GUARD) -> int:
    """Exact number of satisfying assignments by full enumeration."""
    if cnf.num_vars > guard:
        raise GuardExceeded(f"{cnf.num_vars} variables exceeds enumeration guard {guard}")
    masks = cnf.clause_masks()
    count = 0
    for assignment in range(1 << cnf.num_vars):
        for m in masks:
            if not assignment & m:
                break
        else:
            count += 1
    return count


def exact_count_cnf(num_vars: int, p: int) -> MonotoneCNF:
    """Monotone CNF over num_vars variables with exactly p models.

    Recursive construction on l = num_vars:
    * p <= 2^(l-1) - 1: keep the (l-1)-variable formula and add the unit
      clause {x_l} (conjunction with x_l).
    * p == 2^(l-1): the single unit clause {x_l}.
    * p >= 2^(l-1) + 1: distribute x_l into every clause of the
      (l-1)-variable formula for p - 2^(l-1) (disjunction with x_l).

    Clause count never exceeds num_vars.
    """
    if num_vars < 1:
        raise ValueError("need at least one variable")
    if not 1 <= p <= 2**num_vars - 1:
        raise ValueError(f"p={p} outside 1..2^{num_vars}-1")
    clauses = _exact_count_clauses(num_vars, p)
    return MonotoneCNF(num_vars, tuple(frozenset(c) for c in clauses))


def _exact_count_clauses(l: int, p: int) -> list[set[int]]:
    if l == 1:
        return [{1}]  # p must be 1 here
    half = 2 ** (l - 1)
    if p == half:
        return [{l}]
    if p < half:
        return _exact_count_clauses(l - 1, p) + [{l}]
    return [c | {l} for c in _exact_count_clauses(l - 1, p - half)]

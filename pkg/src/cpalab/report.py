"""Shared pass/fail report type for axiom checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple


@dataclass(frozen=True)
class Violation:
    law: str
    where: Tuple[int, ...]
    residual: tuple

    def render(self) -> dict:
        return {
            "law": self.law,
            "where": list(self.where),
            "residual": [str(x) for x in self.residual],
        }


@dataclass
class CheckReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def add(self, law: str, where: tuple, residual) -> None:
        self.violations.append(Violation(law, tuple(where), tuple(residual)))

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.violations.extend(other.violations)
        return self

    def first(self) -> Violation:
        return self.violations[0]

    def render(self) -> dict:
        return {
            "passed": self.passed,
            "violations": [v.render() for v in self.violations],
        }

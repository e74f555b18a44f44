"""Four-valued check outcomes shared by every module."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Iterable

# Limits detected numerically (solver, sampled series) use EPS.
EPS = 1e-9
# Inequalities pass when lhs <= rhs + EPS_CMP and fail only when lhs > rhs + EPS.
EPS_CMP = 1e-12


class Kind(enum.Enum):
    HOLDS = "Holds"
    HOLDS_SAMPLED = "HoldsSampled"
    UNKNOWN = "Unknown"
    FAILS = "Fails"


# aggregation precedence: Fails dominates, then Unknown, then HoldsSampled, then Holds
_RANK = {Kind.HOLDS: 0, Kind.HOLDS_SAMPLED: 1, Kind.UNKNOWN: 2, Kind.FAILS: 3}


@dataclass(frozen=True)
class Verdict:
    kind: Kind
    note: str = ""
    witness: Any = None

    def __post_init__(self):
        if self.kind is Kind.FAILS and self.witness is None:
            raise ValueError("a Fails verdict needs a witness")

    @property
    def passed(self) -> bool:
        return self.kind in (Kind.HOLDS, Kind.HOLDS_SAMPLED)

    @property
    def failed(self) -> bool:
        return self.kind is Kind.FAILS

    def __str__(self):
        return f"{self.kind.value}: {self.note}" if self.note else self.kind.value


def holds(note: str) -> Verdict:
    return Verdict(Kind.HOLDS, note)


def sampled(note: str) -> Verdict:
    return Verdict(Kind.HOLDS_SAMPLED, note)


def fails(note: str, witness: Any) -> Verdict:
    return Verdict(Kind.FAILS, note, witness)


def unknown(note: str, witness: Any = None) -> Verdict:
    return Verdict(Kind.UNKNOWN, note, witness)


def worst(kinds: Iterable[Kind]) -> Kind:
    result = Kind.HOLDS
    for k in kinds:
        if _RANK[k] > _RANK[result]:
            result = k
    return result


def combine(verdicts: Iterable[Verdict], note: str = "") -> Verdict:
    """Conjunction of verdicts; the first Fails (or Unknown) is kept as the witness."""
    verdicts = list(verdicts)
    kind = worst(v.kind for v in verdicts)
    if kind in (Kind.FAILS, Kind.UNKNOWN):
        first = next(v for v in verdicts if v.kind is kind)
        return Verdict(kind, first.note, first.witness)
    return Verdict(kind, note)

"""Property identifiers and checker results."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

from ..core import Ranking


class Scope(enum.Enum):
    UNIVERSAL = "universal"
    SETTING1 = "setting1"
    SETTING2 = "setting2"


class PropertyId(enum.Enum):
    P1 = (1, "DistinguishabilityOfGroups")
    P2 = (2, "Boundedness")
    P3 = (3, "Monotonicity")
    P4 = (4, "Deepness")
    P5 = (5, "IntraGroupFairness")
    P6 = (6, "InvarianceToLinearTransform")
    P7 = (7, "OptimalityOfRandomRankings")
    P8 = (8, "InvarianceToRankingLength")
    P9 = (9, "InvarianceToGroupProportions")
    P10 = (10, "SymmetricPenalties")
    P11 = (11, "ClosenessThreshold")
    P12 = (12, "DeepnessThreshold")
    P13 = (13, "Sensitivity")

    @property
    def number(self) -> int:
        return self.value[0]

    @property
    def title(self) -> str:
        return self.value[1]

    @property
    def scope(self) -> Scope:
        if self.number <= 6:
            return Scope.UNIVERSAL
        return Scope.SETTING1 if self.number <= 10 else Scope.SETTING2

    @classmethod
    def parse(cls, text: str) -> "PropertyId":
        key = text.strip().upper()
        if key.isdigit():
            key = "P" + key
        for p in cls:
            if p.name == key or p.title.upper() == key:
                return p
        raise KeyError(f"unknown property {text!r}")


class Status(enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INAPPLICABLE = "inapplicable"

    @property
    def symbol(self) -> str:
        return {"satisfied": "✓", "violated": "✗", "inapplicable": "N/A"}[self.value]


def _plain(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


@dataclass(frozen=True)
class Counterexample:
    """A concrete instance on which a property fails.

    ``replay`` recomputes ``values`` from scratch and ``holds`` decides the
    property's inequality on a tuple of values, so :meth:`reproduces` checks
    both that the numbers are bit-identical and that the inequality still fails.
    """

    description: str
    rankings: tuple[Ranking, ...]
    values: tuple
    inequality: str
    replay: Callable[[], tuple] = field(repr=False, compare=False)
    holds: Callable[[tuple], bool] = field(repr=False, compare=False)

    def reproduces(self) -> bool:
        again = self.replay()
        return again == self.values and not self.holds(again)

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "rankings": [list(r.ids) for r in self.rankings],
            "groups": ["".join(map(str, r.groups)) for r in self.rankings],
            "values": [_plain(v) for v in self.values],
            "inequality": self.inequality,
        }


@dataclass(frozen=True)
class PropertyVerdict:
    prop: PropertyId
    metric: str
    status: Status
    search_budget: str
    counterexample: Counterexample | None = None
    regime: str | None = None
    threshold: int | None = None
    details: str = ""
    expected: Status | None = None

    def __post_init__(self):
        if self.status is Status.VIOLATED and self.counterexample is None:
            raise ValueError("a violated verdict needs a counterexample")

    @property
    def matches_expected(self) -> bool | None:
        return None if self.expected is None else self.expected is self.status

    @property
    def symbol(self) -> str:
        return self.status.symbol

    def to_dict(self) -> dict:
        d = {
            "property": self.prop.name,
            "title": self.prop.title,
            "metric": self.metric,
            "status": self.status.value,
            "search_budget": self.search_budget,
        }
        if self.regime is not None:
            d["regime"] = self.regime
        if self.threshold is not None:
            d["threshold"] = self.threshold
        if self.details:
            d["details"] = self.details
        if self.expected is not None:
            d["expected"] = self.expected.value
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample.to_dict()
        return d

    def summary(self) -> str:
        head = f"{self.metric} {self.prop.name} ({self.prop.title}): {self.status.value}"
        if self.status is Status.SATISFIED:
            head += " (no counterexample within budget)"
        if self.threshold is not None:
            head += f", N'={self.threshold}"
        lines = [head, f"  budget: {self.search_budget}"]
        if self.regime:
            lines.append(f"  regime: {self.regime}")
        if self.details:
            lines.append(f"  details: {self.details}")
        if self.counterexample is not None:
            ce = self.counterexample
            lines.append(f"  counterexample: {ce.description}")
            for r in ce.rankings:
                lines.append(f"    ranking groups {''.join(map(str, r.groups))}")
            lines.append(f"    {ce.inequality}")
        return "\n".join(lines)

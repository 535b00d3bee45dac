"""Plot-data rows and their CSV / JSON serialization."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

UNDEFINED = "undefined"

HEADER = ("experiment", "metric", "n", "p", "N", "a", "c", "ranking_kind", "query", "value")


class Experiment(enum.Enum):
    LENGTH = "LengthSweep"
    PROPORTION = "ProportionSweep"
    CLOSENESS = "ClosenessSweep"
    TRANSLATION = "TranslationSweep"
    RESCALING = "RescalingSweep"


@dataclass(frozen=True)
class ExperimentRow:
    experiment: Experiment
    metric: str
    value: float | str
    n: int | None = None
    p: float | None = None
    N: int | None = None
    a: float | None = None
    c: float | None = None
    ranking_kind: str | None = None
    query: str | None = None

    def __post_init__(self):
        if isinstance(self.value, str):
            if self.value != UNDEFINED:
                raise ValueError(f"value must be a finite number or {UNDEFINED!r}")
        elif not math.isfinite(self.value):
            raise ValueError(f"non-finite value {self.value!r} for {self.metric}")

    @property
    def is_defined(self) -> bool:
        return not isinstance(self.value, str)

    def cells(self) -> tuple[str, ...]:
        return (self.experiment.value, self.metric, _cell(self.n), _cell(self.p), _cell(self.N),
                _cell(self.a), _cell(self.c), _cell(self.ranking_kind), _cell(self.query), _cell(self.value))

    def to_dict(self) -> dict:
        return dict(zip(HEADER, (self.experiment.value, self.metric, self.n, self.p, self.N, self.a, self.c,
                                 self.ranking_kind, self.query, self.value)))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)  # shortest round-trip form
    return str(v)


def write_csv(rows: Iterable[ExperimentRow], out: TextIO) -> int:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HEADER)
    count = 0
    for row in rows:
        writer.writerow(row.cells())
        count += 1
    return count


def rows_to_csv(rows: Iterable[ExperimentRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def write_json(rows: Iterable[ExperimentRow], out: TextIO) -> None:
    json.dump([r.to_dict() for r in rows], out, indent=1)
    out.write("\n")

"""The metric x property verdict matrix and its expected pattern."""

from __future__ import annotations

import json
from typing import Iterable

from ..metrics import METRIC_NAMES
from .budget import DEFAULT_BUDGET, SearchBudget
from .verdict import PropertyId, PropertyVerdict, Status

_CODES = {"Y": Status.SATISFIED, "N": Status.VIOLATED, "-": Status.INAPPLICABLE}

# One character per property P1..P13: Y satisfied, N violated, - not applicable.
_GOLDEN_ROWS = {
    "rND":  "NYNN--NNNNNNN",
    "rRD":  "NYNN--NNNNNNN",
    "rKL":  "NYNN--NNNNNNN",
    "ED":   "YYYY--YNNNYYY",
    "ER":   "YNYY--NNNNYYY",
    "DTD":  "YNYYNNYNNNYYY",
    "DTR":  "YNYYNNNNNNYYY",
    "DID":  "YNYYYNYNNNYYY",
    "DIR":  "YNYYYNNNNNYYY",
    "AWRF": "NYNN--NNNNNNN",
    "PSP":  "YYYN--YYYY---",
}

GOLDEN: dict[str, dict[PropertyId, Status]] = {
    metric: {p: _CODES[row[p.number - 1]] for p in PropertyId} for metric, row in _GOLDEN_ROWS.items()
}


def expected_status(metric: str, prop: PropertyId) -> Status | None:
    return GOLDEN.get(metric, {}).get(prop)


VerdictTable = dict[str, dict[PropertyId, PropertyVerdict]]


def satisfaction_table(budget: SearchBudget = DEFAULT_BUDGET, metrics: Iterable[str] | None = None,
                       properties: Iterable[PropertyId] | None = None) -> VerdictTable:
    """Run every requested (metric, property) cell; rows follow the metric registry order."""
    from .checkers import check_property

    metrics = list(METRIC_NAMES if metrics is None else metrics)
    properties = list(PropertyId if properties is None else properties)
    return {m: {p: check_property(p, m, budget) for p in properties} for m in metrics}


def golden_mismatches(table: VerdictTable) -> list[PropertyVerdict]:
    return [v for row in table.values() for v in row.values() if v.matches_expected is False]


def render_text(table: VerdictTable) -> str:
    """Fixed-width grid of ✓ / ✗ / N/A, one row per metric."""
    props = list(next(iter(table.values())).keys()) if table else []
    width = max([len(m) for m in table] + [6])
    lines = [" " * width + "".join(f"{p.name:>5}" for p in props)]
    for metric, row in table.items():
        cells = []
        for p in props:
            v = row[p]
            mark = v.symbol + ("!" if v.matches_expected is False else "")
            cells.append(f"{mark:>5}")
        lines.append(f"{metric:<{width}}" + "".join(cells))
    return "\n".join(lines)


def to_json(table: VerdictTable, budget: SearchBudget) -> str:
    doc = {
        "budget": budget.name,
        "seed": budget.seed,
        "config": {
            "cutoffs_small": str(budget.small_cutoffs),
            "cutoffs_grid": str(budget.grid_cutoffs),
            "log_base": budget.config.log_base_divergence.value,
            "normalizer": budget.config.normalizer_mode.value,
        },
        "cells": {m: {p.name: v.to_dict() for p, v in row.items()} for m, row in table.items()},
    }
    return json.dumps(doc, indent=2, ensure_ascii=False)

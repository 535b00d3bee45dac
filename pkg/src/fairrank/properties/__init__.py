"""Axiomatic property checkers and the satisfaction table."""

from .budget import BUDGETS, DEFAULT_BUDGET, QUICK_BUDGET, SearchBudget
from .checkers import CHECKERS, check_property, inapplicable_reason
from .table import GOLDEN, expected_status, golden_mismatches, render_text, satisfaction_table, to_json
from .verdict import Counterexample, PropertyId, PropertyVerdict, Scope, Status

__all__ = [
    "BUDGETS", "DEFAULT_BUDGET", "QUICK_BUDGET", "SearchBudget",
    "CHECKERS", "check_property", "inapplicable_reason",
    "GOLDEN", "expected_status", "golden_mismatches", "render_text", "satisfaction_table", "to_json",
    "Counterexample", "PropertyId", "PropertyVerdict", "Scope", "Status",
]

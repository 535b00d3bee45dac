"""Brute-force reference values for small instances.

These routines deliberately avoid the shortcuts taken in :mod:`fairrank.metrics`:
the normalizer is a maximum over every one of the n! rankings rather than
over group patterns, and expectations average the metric over every ranking.
"""

from __future__ import annotations

import math

from .core import CandidateSet, Group, Population
from .errors import SizeGuardError, UndefinedMetricError
from .generators import enumerate_rankings
from .metrics import DEFAULT_CONFIG, PREFIX_METRICS, MetricConfig, evaluate_metric, get_metric, position_bias

ORACLE_MAX_N = 8


def _oracle_term(metric, protected_in_prefix, k, p0, p1, log):
    # Written independently of metrics._prefix_term but with the same
    # floating-point expressions, so agreement can be bit-exact.
    if metric == "rND":
        return abs(protected_in_prefix / k - p1)
    share1 = protected_in_prefix / k
    share0 = (k - protected_in_prefix) / k
    if metric == "rRD":
        ratio = share1 / share0 if share0 != 0 else 0.0
        return abs(ratio - p1 / p0)
    total = 0.0
    for observed, expected in ((share0, p0), (share1, p1)):
        if observed > 0.0:
            total += observed * log(observed / expected)
    return total


def brute_force_normalizer(metric: str, pop: Population, ds: CandidateSet,
                           cfg: MetricConfig = DEFAULT_CONFIG) -> float:
    """Largest unnormalized prefix sum over all rankings of ``ds`` (0 if degenerate)."""
    if metric not in PREFIX_METRICS:
        raise ValueError(f"not a prefix metric: {metric}")
    if ds.n > ORACLE_MAX_N:
        raise SizeGuardError(f"oracle limited to n <= {ORACLE_MAX_N}, got {ds.n}")
    cutoffs = cfg.cutoffs.resolve(ds.n)
    n = len(pop)
    p1 = pop.protected_count / n
    p0 = (n - pop.protected_count) / n
    log = cfg.log_base_divergence.log
    best = 0.0
    for r in enumerate_rankings(ds):
        s = 0.0
        for k in cutoffs:
            a = sum(1 for c in r.order[:k] if c.group is Group.PROTECTED)
            s += position_bias(k) * _oracle_term(metric, a, k, p0, p1, log)
        if s > best:
            best = s
    return best


def exact_expectation(metric, pop: Population, cfg: MetricConfig = DEFAULT_CONFIG) -> float:
    """Mean of ``metric`` over all rankings of the full population.

    Raises :class:`UndefinedMetricError` carrying the first ranking on which
    the metric is undefined.
    """
    desc = get_metric(metric)
    if len(pop) > ORACLE_MAX_N:
        raise SizeGuardError(f"oracle limited to n <= {ORACLE_MAX_N}, got {len(pop)}")
    values = []
    for r in enumerate_rankings(pop.candidate_set()):
        try:
            values.append(evaluate_metric(desc, pop, r, cfg))
        except UndefinedMetricError as exc:
            if exc.ranking is None:
                exc.ranking = r
            raise
    return math.fsum(values) / len(values)

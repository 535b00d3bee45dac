"""Group-fairness metrics for rankings and axiomatic property checks."""

from .core import Candidate, CandidateSet, Group, Population, Ranking, append, invert, prefix_proportion, swap
from .metrics import (
    DEFAULT_CONFIG,
    METRICS,
    Cutoffs,
    LogBase,
    MetricConfig,
    MetricDescriptor,
    NormalizerMode,
    click_through_rate,
    evaluate_metric,
    exposure,
    kl_divergence,
    position_bias,
    prefix_normalizer,
)

__version__ = "0.1.0"

__all__ = [
    "Candidate", "CandidateSet", "Group", "Population", "Ranking",
    "append", "invert", "prefix_proportion", "swap",
    "DEFAULT_CONFIG", "METRICS", "Cutoffs", "LogBase", "MetricConfig", "MetricDescriptor",
    "NormalizerMode", "click_through_rate", "evaluate_metric", "exposure", "kl_divergence",
    "position_bias", "prefix_normalizer",
]

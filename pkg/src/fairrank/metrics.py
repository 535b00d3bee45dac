"""Position bias, divergences, exposure and the eleven group-fairness metrics.

Every metric is oriented so that values below ``v_opt`` signal a
disadvantage for the protected group. Prefix metrics (rND, rRD, rKL) and
AWRF are reported as ``1 - divergence`` so that ``v_opt = 1``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .core import Group, Population, Ranking
from .errors import (
    CutoffError,
    DivergenceDomainError,
    InapplicableSettingError,
    NormalizationError,
    NormalizerZeroError,
    PositionError,
    SizeGuardError,
    UndefinedMetricError,
)

BRUTE_FORCE_MAX_N = 8
PROB_TOL = 1e-9


class LogBase(enum.Enum):
    NATURAL = "natural"
    BASE2 = "base2"

    @property
    def log(self) -> Callable[[float], float]:
        return math.log if self is LogBase.NATURAL else math.log2


class NormalizerMode(enum.Enum):
    AUTO = "auto"  # brute force up to BRUTE_FORCE_MAX_N, extreme rankings above
    BRUTE_FORCE = "brute"
    EXTREME_RANKING = "extreme"
    EXACT = "exact"  # lattice-path dynamic program, exact for any n


class Setting(enum.Enum):
    FULL_POPULATION = "full"
    SUBSET = "subset"


@dataclass(frozen=True)
class Cutoffs:
    """The index set I of a prefix metric.

    Either an explicit, strictly increasing tuple of positions, or every
    ``step``-th position up to the ranking length (``step=10`` gives
    ``{10, 20, 30, ...}``).
    """

    step: int | None = None
    explicit: tuple[int, ...] | None = None

    def __post_init__(self):
        if (self.step is None) == (self.explicit is None):
            raise ValueError("give exactly one of step or explicit")
        if self.step is not None and self.step < 1:
            raise ValueError("step must be >= 1")
        if self.explicit is not None:
            ks = tuple(int(k) for k in self.explicit)
            if not ks or ks[0] < 1 or any(a >= b for a, b in zip(ks, ks[1:])):
                raise ValueError(f"cut-offs must be nonempty and strictly increasing positive ints: {ks}")
            object.__setattr__(self, "explicit", ks)

    @classmethod
    def every(cls, step: int) -> "Cutoffs":
        return cls(step=step)

    @classmethod
    def of(cls, *ks: int) -> "Cutoffs":
        return cls(explicit=tuple(ks))

    @classmethod
    def parse(cls, text: str) -> "Cutoffs":
        """``"step:10"`` or a comma list such as ``"1,5,10"``."""
        text = text.strip()
        if text.startswith("step:"):
            return cls.every(int(text[5:]))
        return cls.of(*(int(t) for t in text.split(",") if t.strip()))

    def resolve(self, n: int) -> tuple[int, ...]:
        if self.step is not None:
            ks = tuple(range(self.step, n + 1, self.step))
        else:
            ks = self.explicit
            if ks[-1] > n:
                raise CutoffError(f"cut-off {ks[-1]} exceeds ranking length {n}")
        if not ks:
            raise CutoffError(f"no cut-offs at or below ranking length {n}")
        return ks

    def __str__(self):
        return f"step:{self.step}" if self.step is not None else ",".join(map(str, self.explicit))


@dataclass(frozen=True)
class MetricConfig:
    cutoffs: Cutoffs = field(default_factory=lambda: Cutoffs.every(10))
    log_base_divergence: LogBase = LogBase.BASE2
    normalizer_mode: NormalizerMode = NormalizerMode.AUTO

    def with_cutoffs(self, cutoffs: Cutoffs) -> "MetricConfig":
        return MetricConfig(cutoffs, self.log_base_divergence, self.normalizer_mode)


DEFAULT_CONFIG = MetricConfig()


# -- building blocks ---------------------------------------------------------

_bias_table = [0.0]


def position_bias(k: int) -> float:
    """Logarithmic discount ``b(k) = 1 / log2(k + 1)``."""
    if k < 1:
        raise PositionError(f"position bias needs k >= 1, got {k}")
    while len(_bias_table) <= k:
        _bias_table.append(1.0 / math.log2(len(_bias_table) + 1))
    return _bias_table[k]


def _biases(n: int) -> list[float]:
    position_bias(n)
    return _bias_table


@lru_cache(maxsize=None)
def total_bias(n: int) -> float:
    b = _biases(n)
    return sum(b[1 : n + 1])


def _kl(p: Sequence[float], q: Sequence[float], log) -> float:
    s = 0.0
    for pi, qi in zip(p, q):
        if pi > 0.0:
            s += pi * log(pi / qi)
    return s


def _check_distribution(v: Sequence[float], name: str) -> None:
    if len(v) < 2:
        raise ValueError(f"{name} needs at least two components")
    if any(not (-PROB_TOL <= x <= 1 + PROB_TOL) for x in v):
        raise NormalizationError(f"{name} has components outside [0, 1]: {tuple(v)}")
    if abs(math.fsum(v) - 1.0) > PROB_TOL:
        raise NormalizationError(f"{name} sums to {math.fsum(v)}, not 1")


def kl_divergence(p: Sequence[float], q: Sequence[float], base: LogBase = LogBase.BASE2) -> float:
    """``sum_i p_i log(p_i / q_i)`` with ``0 log 0 = 0``."""
    if len(p) != len(q):
        raise ValueError("p and q must have the same length")
    _check_distribution(p, "p")
    _check_distribution(q, "q")
    for pi, qi in zip(p, q):
        if pi > 0 and qi <= 0:
            raise DivergenceDomainError(f"q vanishes where p = {pi}")
    return _kl(p, q, base.log)


def js_divergence(p: Sequence[float], q: Sequence[float], base: LogBase = LogBase.BASE2) -> float:
    """Jensen-Shannon divergence, symmetric and at most 1 bit."""
    if len(p) != len(q):
        raise ValueError("p and q must have the same length")
    _check_distribution(p, "p")
    _check_distribution(q, "q")
    log = base.log
    s = 0.0
    for a, b in zip(p, q):
        # 2a / (a + b) rather than a / m: the mixture (a + b) / 2 can underflow to 0
        if a > 0.0:
            s += a * log(2 * a / (a + b))
        if b > 0.0:
            s += b * log(2 * b / (a + b))
    return 0.5 * s


def _group_sums(r: Ranking) -> tuple[list[float], list[float]]:
    """Per group: sum of b(k) and sum of b(k) * y over ranked members."""
    b = _biases(r.n)
    bias = [0.0, 0.0]
    ctr = [0.0, 0.0]
    for k, c in enumerate(r.order, start=1):
        g = c.group
        bias[g] += b[k]
        ctr[g] += b[k] * c.relevance
    return bias, ctr


def exposure(pop: Population, r: Ranking, g: Group) -> float:
    """Group exposure, divided by the group's size in the full population."""
    g = Group(g)
    return _group_sums(r)[0][g] / pop.group_size(g)


def click_through_rate(pop: Population, r: Ranking, g: Group) -> float:
    g = Group(g)
    return _group_sums(r)[1][g] / pop.group_size(g)


def setting_of(pop: Population, r: Ranking) -> Setting:
    return Setting.FULL_POPULATION if r.n == len(pop) else Setting.SUBSET


# -- prefix metrics ----------------------------------------------------------

PREFIX_METRICS = ("rND", "rRD", "rKL")


def _prefix_term(metric: str, a: int, k: int, pop_n1: int, pop_n: int, log) -> float:
    """Deviation at cut-off k when a of the top-k candidates are protected."""
    p1 = pop_n1 / pop_n
    if metric == "rND":
        return abs(a / k - p1)
    p0 = (pop_n - pop_n1) / pop_n
    p1k = a / k
    p0k = (k - a) / k
    if metric == "rRD":
        ratio = 0.0 if p0k == 0 else p1k / p0k
        return abs(ratio - p1 / p0)
    if metric == "rKL":
        return _kl((p0k, p1k), (p0, p1), log)
    raise ValueError(f"not a prefix metric: {metric}")


def prefix_sum(metric: str, pattern: Sequence[int], cutoffs: Sequence[int], pop_n1: int, pop_n: int,
               base: LogBase = LogBase.BASE2) -> float:
    """Unnormalized discounted sum for a group pattern (1 = protected, by position)."""
    log = base.log
    b = _biases(len(pattern))
    counts = list(itertools.accumulate(pattern, initial=0))
    s = 0.0
    for k in cutoffs:
        s += b[k] * _prefix_term(metric, counts[k], k, pop_n1, pop_n, log)
    return s


def _brute_max(metric, n1, n, cutoffs, pop_n1, pop_n, base):
    if n > BRUTE_FORCE_MAX_N:
        raise SizeGuardError(f"brute-force normalizer limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    best = -math.inf
    for protected in itertools.combinations(range(n), n1):
        pattern = [0] * n
        for i in protected:
            pattern[i] = 1
        best = max(best, prefix_sum(metric, pattern, cutoffs, pop_n1, pop_n, base))
    return best


def _extreme_max(metric, n1, n, cutoffs, pop_n1, pop_n, base):
    first = [1] * n1 + [0] * (n - n1)
    last = [0] * (n - n1) + [1] * n1
    return max(prefix_sum(metric, first, cutoffs, pop_n1, pop_n, base),
               prefix_sum(metric, last, cutoffs, pop_n1, pop_n, base))


def _exact_max(metric, n1, n, cutoffs, pop_n1, pop_n, base):
    # States are protected counts a_k at each cut-off; a_k may rise by at most
    # the gap between consecutive cut-offs and must stay feasible.
    log = base.log
    b = _biases(n)
    n0 = n - n1
    best = {0: 0.0}
    prev_k = 0
    for k in cutoffs:
        gap = k - prev_k
        nxt = {}
        for a, acc in best.items():
            for a2 in range(max(a, k - n0), min(a + gap, n1, k) + 1):
                if a2 not in nxt or acc > nxt[a2]:
                    nxt[a2] = acc
        best = {a: acc + b[k] * _prefix_term(metric, a, k, pop_n1, pop_n, log) for a, acc in nxt.items()}
        prev_k = k
    return max(best.values())


_NORMALIZERS = {
    NormalizerMode.BRUTE_FORCE: _brute_max,
    NormalizerMode.EXTREME_RANKING: _extreme_max,
    NormalizerMode.EXACT: _exact_max,
}


@lru_cache(maxsize=65536)
def _normalizer_cached(metric, n1, n, cutoffs, pop_n1, pop_n, base, mode):
    if mode is NormalizerMode.AUTO:
        mode = NormalizerMode.BRUTE_FORCE if n <= BRUTE_FORCE_MAX_N else NormalizerMode.EXTREME_RANKING
    return _NORMALIZERS[mode](metric, n1, n, cutoffs, pop_n1, pop_n, base)


def prefix_normalizer(metric: str, pop: Population, ds, cfg: MetricConfig = DEFAULT_CONFIG) -> float:
    """``Z(D)``: the largest unnormalized prefix sum over rankings of ``ds``.

    Only the protected count of ``ds`` matters, so the maximization runs over
    group patterns. Raises :class:`NormalizerZeroError` when every ranking
    scores zero.
    """
    if metric not in PREFIX_METRICS:
        raise ValueError(f"not a prefix metric: {metric}")
    cutoffs = cfg.cutoffs.resolve(ds.n)
    z = _normalizer_cached(metric, ds.group_count(Group.PROTECTED), ds.n, cutoffs,
                           pop.protected_count, len(pop), cfg.log_base_divergence, cfg.normalizer_mode)
    if z <= 0.0:
        raise NormalizerZeroError(f"{metric}: every ranking of this candidate set has prefix sum 0 at I={cutoffs}")
    return z


def _prefix_metric(metric):
    def evaluate(pop: Population, r: Ranking, cfg: MetricConfig) -> float:
        z = prefix_normalizer(metric, pop, r.candidate_set, cfg)
        s = prefix_sum(metric, r.groups, cfg.cutoffs.resolve(r.n), pop.protected_count, len(pop),
                       cfg.log_base_divergence)
        return 1.0 - s / z

    evaluate.__name__ = metric
    return evaluate


# -- exposure family ---------------------------------------------------------

def _exposures(pop, r):
    bias, ctr = _group_sums(r)
    n0, n1 = pop.nonprotected_count, pop.protected_count
    return bias[0] / n0, bias[1] / n1, ctr[0] / n0, ctr[1] / n1


def _ed(pop, r, cfg):
    e0, e1, _, _ = _exposures(pop, r)
    return e1 - e0


def _er(pop, r, cfg):
    e0, e1, _, _ = _exposures(pop, r)
    if e0 == 0.0:
        raise UndefinedMetricError("ER", "Exposure(G0)", r)
    return e1 / e0


def _mean_relevances(pop, metric, r, need0=True, need1=True):
    y0 = pop.mean_relevance(Group.NON_PROTECTED)
    y1 = pop.mean_relevance(Group.PROTECTED)
    if need1 and y1 == 0.0:
        raise UndefinedMetricError(metric, "Y(G1)", r)
    if need0 and y0 == 0.0:
        raise UndefinedMetricError(metric, "Y(G0)", r)
    return y0, y1


def _dtd(pop, r, cfg):
    e0, e1, _, _ = _exposures(pop, r)
    y0, y1 = _mean_relevances(pop, "DTD", r)
    return e1 / y1 - e0 / y0


def _dtr(pop, r, cfg):
    e0, e1, _, _ = _exposures(pop, r)
    y0, y1 = _mean_relevances(pop, "DTR", r, need0=False)
    if e0 == 0.0:
        raise UndefinedMetricError("DTR", "Exposure(G0)", r)
    return (e1 / e0) * (y0 / y1)


def _did(pop, r, cfg):
    _, _, c0, c1 = _exposures(pop, r)
    y0, y1 = _mean_relevances(pop, "DID", r)
    return c1 / y1 - c0 / y0


def _dir(pop, r, cfg):
    _, _, c0, c1 = _exposures(pop, r)
    y0, y1 = _mean_relevances(pop, "DIR", r, need0=False)
    if c0 == 0.0:
        raise UndefinedMetricError("DIR", "CTR(G0)", r)
    return (c1 / c0) * (y0 / y1)


# -- AWRF and PSP -------------------------------------------------------------

def exposure_distribution(r: Ranking) -> tuple[float, float]:
    """``p_Exp(r)``: share of total position bias collected by (G0, G1)."""
    bias, _ = _group_sums(r)
    t = total_bias(r.n)
    return bias[0] / t, bias[1] / t


def _awrf(pop, r, cfg):
    pe = exposure_distribution(r)
    pg = pop.p_groups
    mix = ((pe[0] + pg[0]) / 2, (pe[1] + pg[1]) / 2)
    log = cfg.log_base_divergence.log
    return 1.0 - (0.5 * _kl(pe, mix, log) + 0.5 * _kl(pg, mix, log))


def _psp(pop, r, cfg):
    if r.n != len(pop):
        raise InapplicableSettingError("PSP is only defined when the full population is ranked")
    protected_seen = 0
    favourable = 0  # pairs (d in G0, d' in G1) with d' ranked above d
    for c in r.order:
        if c.group is Group.PROTECTED:
            protected_seen += 1
        else:
            favourable += protected_seen
    pairs = pop.nonprotected_count * pop.protected_count
    return (favourable - (pairs - favourable)) / pairs


# -- descriptors ---------------------------------------------------------------

@dataclass(frozen=True)
class MetricDescriptor:
    name: str
    v_opt: float
    uses_relevance: bool
    settings: frozenset
    evaluate: Callable[[Population, Ranking, MetricConfig], float] = field(repr=False, compare=False)
    description: str = ""

    def __call__(self, pop: Population, r: Ranking, cfg: MetricConfig = DEFAULT_CONFIG) -> float:
        return evaluate_metric(self, pop, r, cfg)

    def applies_to(self, setting: Setting) -> bool:
        return setting in self.settings

    @property
    def is_prefix(self) -> bool:
        return self.name in PREFIX_METRICS


_BOTH = frozenset({Setting.FULL_POPULATION, Setting.SUBSET})

METRICS: dict[str, MetricDescriptor] = {
    d.name: d
    for d in (
        MetricDescriptor("rND", 1.0, False, _BOTH, _prefix_metric("rND"), "normalized discounted difference"),
        MetricDescriptor("rRD", 1.0, False, _BOTH, _prefix_metric("rRD"), "normalized discounted ratio"),
        MetricDescriptor("rKL", 1.0, False, _BOTH, _prefix_metric("rKL"), "normalized discounted KL-divergence"),
        MetricDescriptor("ED", 0.0, False, _BOTH, _ed, "exposure difference"),
        MetricDescriptor("ER", 1.0, False, _BOTH, _er, "exposure ratio"),
        MetricDescriptor("DTD", 0.0, True, _BOTH, _dtd, "disparate treatment difference"),
        MetricDescriptor("DTR", 1.0, True, _BOTH, _dtr, "disparate treatment ratio"),
        MetricDescriptor("DID", 0.0, True, _BOTH, _did, "disparate impact difference"),
        MetricDescriptor("DIR", 1.0, True, _BOTH, _dir, "disparate impact ratio"),
        MetricDescriptor("AWRF", 1.0, False, _BOTH, _awrf, "attention-weighted rank fairness"),
        MetricDescriptor("PSP", 0.0, False, frozenset({Setting.FULL_POPULATION}), _psp,
                         "pairwise statistical parity"),
    )
}

METRIC_NAMES = tuple(METRICS)


def get_metric(name: str | MetricDescriptor) -> MetricDescriptor:
    if isinstance(name, MetricDescriptor):
        return name
    try:
        return METRICS[name]
    except KeyError:
        pass
    for key, desc in METRICS.items():
        if key.lower() == str(name).lower():
            return desc
    raise KeyError(f"unknown metric {name!r}; choose from {', '.join(METRIC_NAMES)}")


def evaluate_metric(desc: str | MetricDescriptor, pop: Population, r: Ranking,
                    cfg: MetricConfig = DEFAULT_CONFIG) -> float:
    desc = get_metric(desc)
    if r.population is not pop and r.population != pop:
        raise ValueError("ranking does not belong to the given population")
    if not desc.applies_to(setting_of(pop, r)):
        raise InapplicableSettingError(f"{desc.name} does not apply when only a subset is ranked")
    return desc.evaluate(pop, r, cfg)

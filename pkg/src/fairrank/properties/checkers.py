"""Falsification search for the thirteen properties.

Each checker walks a finite family of instances fixed by the budget and
stops at the first violation. A checker that exhausts its families reports
``Satisfied``, which is only a statement about that budget.
"""

from __future__ import annotations

import itertools
import math
import random
import zlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator

from ..core import Group, Population, Ranking, append, swap
from ..errors import (
    CutoffError,
    InapplicableSettingError,
    NormalizerZeroError,
    UndefinedMetricError,
)
from ..generators import (
    PopulationSpec,
    make_dn_pair,
    make_first,
    make_last,
    make_population_counts,
    population_from_pattern,
    sample_ranking,
    subset_instance,
)
from ..metrics import Cutoffs, MetricConfig, MetricDescriptor, evaluate_metric, get_metric
from ..oracle import exact_expectation
from .budget import DEFAULT_BUDGET, SearchBudget
from .verdict import Counterexample, PropertyId, PropertyVerdict, Status

EPS = 1e-12
REL_TOL = 1e-9

# Errors that say "this configuration cannot be scored at all" rather than
# "the metric is ill-defined on this ranking".
_CONFIG_ERRORS = (NormalizerZeroError, CutoffError, InapplicableSettingError)
_SKIP_ERRORS = _CONFIG_ERRORS + (UndefinedMetricError,)


def strictly_greater(a: float, b: float) -> bool:
    """``a > b`` with ties inside ``EPS`` counted as failures."""
    return a - b > EPS


@dataclass(frozen=True)
class Instance:
    pop: Population
    ranking: Ranking
    cfg: MetricConfig
    label: str

    def value(self, desc: MetricDescriptor, r: Ranking | None = None) -> float:
        return evaluate_metric(desc, self.pop, self.ranking if r is None else r, self.cfg)


def _describe(pop: Population, cfg: MetricConfig, extra: str = "") -> str:
    text = (f"population |G0|={pop.nonprotected_count} |G1|={pop.protected_count}, "
            f"cut-offs {cfg.cutoffs}")
    return text + (f", {extra}" if extra else "")


def _relevance_text(r: Ranking) -> str:
    return "relevance " + ",".join(f"{c.relevance:g}" for c in r.order)


# -- instance families ---------------------------------------------------------

def _patterns(n: int, *, need_both: bool) -> Iterator[tuple[int, ...]]:
    for pat in itertools.product((0, 1), repeat=n):
        if need_both and not (0 in pat and 1 in pat):
            continue
        yield pat


def small_full_instances(budget: SearchBudget, relevance: tuple[float, ...] | None) -> Iterator[Instance]:
    """Every group pattern (and relevance vector over ``relevance``) ranked in full, n <= max."""
    cfg = budget.small_config
    for n in range(2, budget.exhaustive_max_n + 1):
        for pat in _patterns(n, need_both=True):
            ys_iter = [None] if relevance is None else itertools.product(relevance, repeat=n)
            for ys in ys_iter:
                pop, r = population_from_pattern(pat, ys)
                yield Instance(pop, r, cfg, "full population")


def small_subset_instances(budget: SearchBudget, relevance: tuple[float, ...] | None, *,
                           need_both: bool = True, need_extra_g0: bool = False,
                           extra_relevance: float = 1.0) -> Iterator[Instance]:
    """Strict subsets: a ranked pattern of length <= max-1 plus unranked extras."""
    cfg = budget.small_config
    for n in range(1, budget.exhaustive_max_n):
        for pat in _patterns(n, need_both=need_both):
            for e0, e1 in budget.subset_extras:
                if need_extra_g0 and e0 == 0:
                    continue
                if (0 not in pat and e0 == 0) or (1 not in pat and e1 == 0):
                    continue
                ys_iter = [None] if relevance is None else itertools.product(relevance, repeat=n)
                for ys in ys_iter:
                    pop, r = subset_instance(pat, ys, (e0, e1), extra_relevance)
                    yield Instance(pop, r, cfg, f"subset with {e0} unranked G0 and {e1} unranked G1")


def random_instances(budget: SearchBudget, *, uniform: bool = False) -> Iterator[Instance]:
    rng = random.Random(budget.seed)
    for _ in range(budget.random_instances):
        n = rng.randint(2, budget.random_max_n)
        pat = [rng.randint(0, 1) for _ in range(n)]
        if len(set(pat)) == 1:
            pat[rng.randrange(n)] ^= 1
        ys = [1.0] * n if uniform else [rng.choice(budget.random_relevance) for _ in range(n)]
        cutoffs = budget.grid_cutoffs if n >= 10 else budget.small_cutoffs
        cfg = budget.config.with_cutoffs(cutoffs)
        if rng.random() < 0.5:
            pop, r = population_from_pattern(pat, ys)
            yield Instance(pop, r, cfg, "random full population")
        else:
            extra = (rng.randint(1, 5), rng.randint(0, 5))
            y_extra = 1.0 if uniform else rng.choice(budget.random_relevance)
            pop, r = subset_instance(pat, ys, extra, y_extra)
            yield Instance(pop, r, cfg, "random subset")


def _capped(pairs: list, budget: SearchBudget, inst: Instance) -> list:
    if len(pairs) <= budget.pairs_per_instance or not inst.label.startswith("random"):
        return pairs
    rng = random.Random(zlib.crc32(",".join((str(budget.seed),) + inst.ranking.ids).encode()))
    return sorted(rng.sample(pairs, budget.pairs_per_instance))


@lru_cache(maxsize=None)
def _population(n0: int, n1: int) -> Population:
    return make_population_counts(n0, n1)


def _spec_population(n: int, p: float) -> Population:
    return _population(*PopulationSpec(n, p).counts)


@lru_cache(maxsize=None)
def _extremes(name: str, n0: int, n1: int, cfg: MetricConfig) -> tuple[float, float]:
    """``(v_first, v_last)`` on the uniform population with the given group sizes."""
    pop = _population(n0, n1)
    ds = pop.candidate_set()
    desc = get_metric(name)
    return (evaluate_metric(desc, pop, make_first(ds), cfg), evaluate_metric(desc, pop, make_last(ds), cfg))


def _setting1_populations(budget: SearchBudget, grids: Iterable[str]) -> Iterator[tuple[int, int, MetricConfig, str]]:
    for grid in grids:
        if grid == "length":
            for n in budget.length_grid:
                n0, n1 = PopulationSpec(n, budget.length_p).counts
                yield n0, n1, budget.grid_config, f"length grid n={n}, p={budget.length_p}"
        elif grid == "proportion":
            for p in budget.proportion_grid:
                n0, n1 = PopulationSpec(budget.proportion_n, p).counts
                yield n0, n1, budget.grid_config, f"proportion grid n={budget.proportion_n}, p={p}"
        elif grid == "small":
            for n in range(2, budget.exhaustive_max_n + 1):
                for n1 in range(1, n):
                    yield n - n1, n1, budget.small_config, f"small population n={n}"


def _extremes_counterexample(desc, n0, n1, cfg, values, inequality, holds, label):
    pop = _population(n0, n1)
    ds = pop.candidate_set()
    return Counterexample(
        description=_describe(pop, cfg, label),
        rankings=(make_first(ds), make_last(ds)),
        values=values,
        inequality=inequality,
        replay=lambda: (_extremes.__wrapped__(desc.name, n0, n1, cfg)),
        holds=holds,
    )


# -- verdict helpers -------------------------------------------------------------

class _Search:
    """Bookkeeping shared by the checkers."""

    def __init__(self, prop: PropertyId, desc: MetricDescriptor, budget_text: str):
        self.prop = prop
        self.desc = desc
        self.budget_text = budget_text
        self.instances = 0
        self.comparisons = 0
        self.skipped = 0

    def details(self, extra: str = "") -> str:
        text = f"{self.instances} instances, {self.comparisons} comparisons, {self.skipped} skipped (undefined or not scorable)"
        return text + (f"; {extra}" if extra else "")

    def violated(self, ce: Counterexample, **kw) -> PropertyVerdict:
        return PropertyVerdict(self.prop, self.desc.name, Status.VIOLATED, self.budget_text, ce,
                               details=kw.pop("details", self.details()), **kw)

    def satisfied(self, **kw) -> PropertyVerdict:
        return PropertyVerdict(self.prop, self.desc.name, Status.SATISFIED, self.budget_text,
                               details=kw.pop("details", self.details()), **kw)


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


# -- P1 ---------------------------------------------------------------------------

def check_distinguishability(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    s = _Search(PropertyId.P1, desc, "Setting 1, uniform relevance: length grid, proportion grid, all splits n<=" +
                str(budget.exhaustive_max_n))
    opt = desc.v_opt

    def holds(v):
        return strictly_greater(opt, v[1]) and strictly_greater(v[0], opt)

    for n0, n1, cfg, label in _setting1_populations(budget, ("small", "length", "proportion")):
        try:
            v = _extremes(desc.name, n0, n1, cfg)
        except _SKIP_ERRORS:
            s.skipped += 1
            continue
        s.instances += 1
        s.comparisons += 1
        if not holds(v):
            return s.violated(_extremes_counterexample(
                desc, n0, n1, cfg, v,
                f"v_last={_fmt(v[1])} < v_opt={opt} < v_first={_fmt(v[0])} fails", holds, label))
    return s.satisfied()


# -- P2 ---------------------------------------------------------------------------

def _p2_families(budget: SearchBudget) -> Iterator[Instance]:
    yield from small_full_instances(budget, None)
    yield from small_subset_instances(budget, None, need_both=False)
    # zero average relevance in one group
    cfg = budget.small_config
    for pat in ((1, 0), (0, 1), (1, 0, 1, 0), (0, 1, 0, 1)):
        for zero_group in (0, 1):
            ys = [0.0 if g == zero_group else 1.0 for g in pat]
            pop, r = population_from_pattern(pat, ys)
            yield Instance(pop, r, cfg, f"all G{zero_group} relevance 0")
    # one non-protected candidate at the bottom of a long protected block
    for n in budget.growth_sizes:
        half = max(n // 2, 1)
        pop = _population(half, max(n - 1, half))
        ids = [c.id for c in pop.members(Group.PROTECTED)][: n - 1] + [pop.members(Group.NON_PROTECTED)[0].id]
        r = Ranking.from_ids(pop, ids)
        cutoffs = budget.grid_cutoffs if n >= 10 else budget.small_cutoffs
        yield Instance(pop, r, budget.config.with_cutoffs(cutoffs), f"growth family n={n}")
    # shrinking protected relevance
    for f in budget.downscale_factors:
        pop, r = population_from_pattern((1, 0), (f, 1.0))
        yield Instance(pop, r, cfg, f"protected relevance scaled to {f:g}")


def check_boundedness(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    bound = budget.magnitude_bound
    s = _Search(PropertyId.P2, desc,
                f"all rankings n<={budget.exhaustive_max_n} (full and subset), zero-relevance groups, "
                f"growth family up to n={max(budget.growth_sizes)}, relevance down-scaling; |m| <= {bound:g}")

    def holds(v):
        return isinstance(v[0], float) and math.isfinite(v[0]) and abs(v[0]) <= bound

    for inst in _p2_families(budget):
        def measure(inst=inst):
            try:
                return (inst.value(desc),)
            except UndefinedMetricError:
                return ("undefined",)

        try:
            v = measure()
        except _CONFIG_ERRORS:
            s.skipped += 1
            continue
        s.instances += 1
        s.comparisons += 1
        if not holds(v):
            what = "is undefined" if v[0] == "undefined" else f"= {_fmt(v[0])} exceeds the bound {bound:g}"
            ce = Counterexample(
                _describe(inst.pop, inst.cfg, inst.label + "; " + _relevance_text(inst.ranking)),
                (inst.ranking,), v, f"{desc.name}(r) {what}", measure, holds)
            return s.violated(ce)
    return s.satisfied()


# -- P3, P4, P5: swap properties ------------------------------------------------------

def _swap_families(budget: SearchBudget) -> Iterator[Instance]:
    levels = budget.exhaustive_relevance
    yield from small_full_instances(budget, levels)
    yield from small_subset_instances(budget, levels, need_both=True)
    yield from random_instances(budget)


def _monotonicity_pairs(r: Ranking):
    g = r.groups
    y = [c.relevance for c in r.order]
    return [(i + 1, j + 1) for i in range(r.n) for j in range(i + 1, r.n)
            if g[i] == 0 and g[j] == 1 and y[i] <= y[j]]


def _deepness_pairs(r: Ranking):
    g = r.groups
    y = [c.relevance for c in r.order]
    out = []
    for i in range(r.n - 1):
        for j in range(i + 1, r.n - 1):
            if y[i] != y[j] or y[i + 1] != y[j + 1]:
                continue
            if g[i] == g[j] and g[i + 1] == g[j + 1] and g[i] != g[i + 1]:
                out.append((i + 1, j + 1))
    return out


def _intra_group_pairs(r: Ranking):
    g = r.groups
    y = [c.relevance for c in r.order]
    return [(i + 1, j + 1) for i in range(r.n) for j in range(i + 1, r.n) if g[i] == g[j] and y[i] < y[j]]


def _swap_check(prop, desc, budget, families, pairs_of, compare, render, budget_text, pinned=()):
    """Generic search over (instance, index pair)."""
    s = _Search(prop, desc, budget_text)
    for inst in itertools.chain(pinned, families):
        pairs = _capped(pairs_of(inst.ranking), budget, inst)
        if not pairs:
            continue
        try:
            base = inst.value(desc)
        except _SKIP_ERRORS:
            s.skipped += 1
            continue
        s.instances += 1
        for pair in pairs:
            try:
                v = compare.measure(desc, inst, base, pair)
            except _SKIP_ERRORS:
                s.skipped += 1
                continue
            s.comparisons += 1
            if not compare.holds(v):
                def replay(inst=inst, pair=pair):
                    return compare.measure(desc, inst, inst.value(desc), pair)

                ce = Counterexample(
                    _describe(inst.pop, inst.cfg, inst.label + "; " + _relevance_text(inst.ranking)),
                    compare.rankings(inst, pair), v, render(v, pair), replay, compare.holds)
                return s.violated(ce)
    return s.satisfied()


class _Increase:
    """m(r_{i<->j}) > m(r)."""

    @staticmethod
    def measure(desc, inst, base, pair):
        return (base, inst.value(desc, swap(inst.ranking, *pair)))

    @staticmethod
    def holds(v):
        return strictly_greater(v[1], v[0])

    @staticmethod
    def rankings(inst, pair):
        return (inst.ranking, swap(inst.ranking, *pair))


class _Deeper:
    """|m(r) - m(r_{i<->i+1})| > |m(r) - m(r_{j<->j+1})|."""

    @staticmethod
    def measure(desc, inst, base, pair):
        i, j = pair
        return (base, inst.value(desc, swap(inst.ranking, i, i + 1)), inst.value(desc, swap(inst.ranking, j, j + 1)))

    @staticmethod
    def holds(v):
        return strictly_greater(abs(v[0] - v[1]), abs(v[0] - v[2]))

    @staticmethod
    def rankings(inst, pair):
        i, j = pair
        return (inst.ranking, swap(inst.ranking, i, i + 1), swap(inst.ranking, j, j + 1))


class _IntraGroup:
    """Protected pair: m increases; non-protected pair: m decreases."""

    @staticmethod
    def measure(desc, inst, base, pair):
        g = float(inst.ranking.at(pair[0]).group)
        return (base, inst.value(desc, swap(inst.ranking, *pair)), g)

    @staticmethod
    def holds(v):
        return strictly_greater(v[1], v[0]) if v[2] == 1.0 else strictly_greater(v[0], v[1])

    rankings = _Increase.rankings


def check_monotonicity(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    return _swap_check(
        PropertyId.P3, desc, budget, _swap_families(budget), _monotonicity_pairs, _Increase,
        lambda v, p: f"m(r_{{{p[0]}<->{p[1]}}})={_fmt(v[1])} is not > m(r)={_fmt(v[0])}",
        _swap_budget_text(budget, "pairs r(i) in G0, r(j) in G1, i<j, y(r(i)) <= y(r(j))"))


def _awrf_deepness_instance(budget: SearchBudget) -> Instance:
    pop = _population(14, 11)
    prot = [c.id for c in pop.members(Group.PROTECTED)]
    nonp = [c.id for c in pop.members(Group.NON_PROTECTED)]
    ids = [nonp[0], prot[0], nonp[1], prot[1], nonp[2], prot[2]]
    return Instance(pop, Ranking.from_ids(pop, ids), budget.small_config, "pinned deepness instance")


def check_deepness(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    pinned = [_awrf_deepness_instance(budget)]

    def pairs_of(r):
        return _deepness_pairs(r)

    return _swap_check(
        PropertyId.P4, desc, budget, _swap_families(budget), pairs_of, _Deeper,
        lambda v, p: (f"|m(r)-m(r_{{{p[0]}<->{p[0] + 1}}})|={_fmt(abs(v[0] - v[1]))} is not > "
                      f"|m(r)-m(r_{{{p[1]}<->{p[1] + 1}}})|={_fmt(abs(v[0] - v[2]))}"),
        _swap_budget_text(budget, "adjacent cross-group pairs at i<j with matching relevance")
        + "; pinned instance |G0|=14 |G1|=11, pattern 010101",
        pinned=pinned)


def check_intra_group_fairness(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    return _swap_check(
        PropertyId.P5, desc, budget, _swap_families(budget), _intra_group_pairs, _IntraGroup,
        lambda v, p: (f"swap {p[0]}<->{p[1]} within G{int(v[2])}: m moved from {_fmt(v[0])} to {_fmt(v[1])}, "
                      f"expected {'increase' if v[2] == 1.0 else 'decrease'}"),
        _swap_budget_text(budget, "same-group pairs i<j with y(r(i)) < y(r(j))"))


def _swap_budget_text(budget: SearchBudget, pairs: str) -> str:
    return (f"all rankings n<={budget.exhaustive_max_n} with relevance in {budget.exhaustive_relevance} "
            f"(full and subset with both groups ranked) plus {budget.random_instances} random instances "
            f"n<={budget.random_max_n}, relevance in {budget.random_relevance}, "
            f"<= {budget.pairs_per_instance} pairs each; {pairs}")


# -- P6 ---------------------------------------------------------------------------

def check_linear_invariance(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    s = _Search(PropertyId.P6, desc,
                f"a in {budget.scale_a}, c in {budget.translate_c} over "
                + _swap_budget_text(budget, "every instance").split("; ")[0])
    transforms = [(a, c) for a in budget.scale_a for c in budget.translate_c if (a, c) != (1.0, 0.0)]

    def holds(v):
        return math.isclose(v[0], v[1], rel_tol=REL_TOL, abs_tol=EPS)

    for inst in _swap_families(budget):
        try:
            base = inst.value(desc)
        except _SKIP_ERRORS:
            s.skipped += 1
            continue
        s.instances += 1
        for a, c in transforms:
            def measure(inst=inst, a=a, c=c):
                pop2 = inst.pop.with_relevance(lambda y: a * y + c)
                return (inst.value(desc), evaluate_metric(desc, pop2, inst.ranking.rebase(pop2), inst.cfg))

            try:
                v = measure()
            except _SKIP_ERRORS:
                s.skipped += 1
                continue
            s.comparisons += 1
            if not holds(v):
                ce = Counterexample(
                    _describe(inst.pop, inst.cfg, inst.label + "; " + _relevance_text(inst.ranking)),
                    (inst.ranking,), v,
                    f"m(r(D))={_fmt(v[0])} != m(r(f_{{a={a:g},c={c:g}}}(D)))={_fmt(v[1])}", measure, holds)
                return s.violated(ce)
    return s.satisfied()


# -- P7 ---------------------------------------------------------------------------

def _monte_carlo(desc, pop, cfg, samples, seed):
    rng = random.Random(seed)
    ds = pop.candidate_set()
    values = [evaluate_metric(desc, pop, sample_ranking(ds, rng), cfg) for _ in range(samples)]
    mean = math.fsum(values) / samples
    var = math.fsum((v - mean) ** 2 for v in values) / (samples - 1)
    return mean, math.sqrt(var / samples)


def check_random_optimality(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    mc_text = (f"; Monte Carlo {budget.monte_carlo_samples} samples on (n, |G1|) in {budget.monte_carlo}, 3 sigma"
               if budget.monte_carlo else "")
    s = _Search(PropertyId.P7, desc,
                f"exact expectation over all splits n<={budget.expectation_max_n}" + mc_text)
    cfg = budget.small_config
    opt = desc.v_opt

    def exact_holds(v):
        return abs(v[0] - opt) <= EPS

    regime = "exact"
    for n in range(2, budget.expectation_max_n + 1):
        for n1 in range(1, n):
            pop = _population(n - n1, n1)

            def measure(pop=pop):
                return (exact_expectation(desc, pop, cfg),)

            try:
                v = measure()
            except _SKIP_ERRORS:
                s.skipped += 1
                continue
            s.instances += 1
            s.comparisons += 1
            if not exact_holds(v):
                ce = Counterexample(_describe(pop, cfg, "exact expectation over all rankings"),
                                    (make_first(pop.candidate_set()),), v,
                                    f"v_E={_fmt(v[0])} != v_opt={opt}", measure, exact_holds)
                return s.violated(ce, regime=regime)
    for idx, (n, n1) in enumerate(budget.monte_carlo):
        regime = "exact+monte-carlo"
        pop = _population(n - n1, n1)
        seed = budget.seed * 1000 + idx

        def measure(pop=pop, seed=seed):
            return _monte_carlo(desc, pop, budget.config, budget.monte_carlo_samples, seed)

        def mc_holds(v):
            return abs(v[0] - opt) <= max(3 * v[1], EPS)

        try:
            v = measure()
        except _SKIP_ERRORS:
            s.skipped += 1
            continue
        s.instances += 1
        s.comparisons += 1
        if not mc_holds(v):
            ce = Counterexample(_describe(pop, budget.config, f"Monte Carlo seed {seed}"),
                                (make_first(pop.candidate_set()),), v,
                                f"|v_E - v_opt| = {abs(v[0] - opt):.3g} exceeds 3 sigma = {3 * v[1]:.3g}",
                                measure, mc_holds)
            return s.violated(ce, regime=regime)
    return s.satisfied(regime=regime)


# -- P8, P9, P10 ------------------------------------------------------------------

def _grid_invariance(prop, desc, budget, grid, budget_text):
    s = _Search(prop, desc, budget_text)
    ref = None
    for n0, n1, cfg, label in _setting1_populations(budget, (grid,)):
        try:
            v = _extremes(desc.name, n0, n1, cfg)
        except _SKIP_ERRORS:
            s.skipped += 1
            continue
        s.instances += 1
        if ref is None:
            ref = (n0, n1, cfg, label, v)
            continue
        s.comparisons += 1
        r0, r1, rcfg, rlabel, rv = ref

        def holds(vals):
            return abs(vals[0] - vals[2]) <= EPS and abs(vals[1] - vals[3]) <= EPS

        values = rv + v
        if not holds(values):
            pa, pb = _population(r0, r1), _population(n0, n1)

            def replay(r0=r0, r1=r1, n0=n0, n1=n1, rcfg=rcfg, cfg=cfg):
                return (_extremes.__wrapped__(desc.name, r0, r1, rcfg)
                        + _extremes.__wrapped__(desc.name, n0, n1, cfg))

            ce = Counterexample(
                f"{rlabel} vs {label}; cut-offs {cfg.cutoffs}",
                (make_first(pa.candidate_set()), make_last(pa.candidate_set()),
                 make_first(pb.candidate_set()), make_last(pb.candidate_set())),
                values,
                f"(v_first, v_last) = ({_fmt(values[0])}, {_fmt(values[1])}) vs "
                f"({_fmt(values[2])}, {_fmt(values[3])})",
                replay, holds)
            return s.violated(ce)
    return s.satisfied()


def check_length_invariance(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    return _grid_invariance(PropertyId.P8, desc, budget, "length",
                            f"n in {budget.length_grid[0]}..{budget.length_grid[-1]} ({len(budget.length_grid)} "
                            f"points), p={budget.length_p}, cut-offs {budget.grid_cutoffs}")


def check_proportion_invariance(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    return _grid_invariance(PropertyId.P9, desc, budget, "proportion",
                            f"n={budget.proportion_n}, p in {budget.proportion_grid[0]}..{budget.proportion_grid[-1]} "
                            f"({len(budget.proportion_grid)} points), cut-offs {budget.grid_cutoffs}")


def check_symmetric_penalties(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    s = _Search(PropertyId.P10, desc,
                "Setting 1, uniform relevance: all splits n<=" + str(budget.exhaustive_max_n)
                + ", length grid, proportion grid; additive or multiplicative symmetry within 1e-9")
    opt = desc.v_opt

    def holds(v):
        first, last = v
        if math.isclose(abs(first - opt), abs(opt - last), rel_tol=REL_TOL, abs_tol=REL_TOL):
            return True
        if opt != 0 and last != 0:
            return math.isclose(first / opt, opt / last, rel_tol=REL_TOL, abs_tol=REL_TOL)
        return False

    for n0, n1, cfg, label in _setting1_populations(budget, ("small", "length", "proportion")):
        try:
            v = _extremes(desc.name, n0, n1, cfg)
        except _SKIP_ERRORS:
            s.skipped += 1
            continue
        s.instances += 1
        s.comparisons += 1
        if not holds(v):
            return s.violated(_extremes_counterexample(
                desc, n0, n1, cfg, v,
                f"|v_first - v_opt| = {_fmt(abs(v[0] - opt))} vs |v_opt - v_last| = {_fmt(abs(opt - v[1]))}"
                + (f"; v_first/v_opt = {_fmt(v[0] / opt)} vs v_opt/v_last = {_fmt(opt / v[1])}"
                   if opt != 0 and v[1] != 0 else ""),
                holds, label))
    return s.satisfied()


# -- P11, P12 ---------------------------------------------------------------------

def _threshold_presets(desc: MetricDescriptor, budget: SearchBudget):
    """Cut-off choices as functions of N; only prefix metrics read them."""
    if desc.is_prefix:
        return (("I={N}", lambda N: Cutoffs.of(N)), ("I=every 1", lambda N: budget.small_cutoffs))
    return (("-", lambda N: budget.small_cutoffs),)


def _dn_values(desc, pop, N, cfg):
    d_n, d_n_prime = make_dn_pair(pop, N)
    return (evaluate_metric(desc, pop, make_first(d_n), cfg),
            evaluate_metric(desc, pop, make_last(d_n_prime), cfg))


def _threshold_series(desc, budget):
    """Yield (p, preset, N, values-or-None) over the closeness/deepness grid."""
    for p in budget.threshold_ps:
        pop = _spec_population(budget.threshold_population, p)
        for preset, cutoffs_for in _threshold_presets(desc, budget):
            series = []
            for N in range(1, budget.threshold_max_N + 1):
                cfg = budget.config.with_cutoffs(cutoffs_for(N))
                try:
                    series.append((N, cfg, _dn_values(desc, pop, N, cfg)))
                except _SKIP_ERRORS:
                    series.append((N, cfg, None))
            yield p, pop, preset, series


def _dn_counterexample(desc, pop, p, preset, N, cfg, v, inequality, holds):
    d_n, d_n_prime = make_dn_pair(pop, N)
    return Counterexample(
        _describe(pop, cfg, f"p_G1={p}, {preset}, N={N}"),
        (make_first(d_n), make_last(d_n_prime)), v, inequality,
        lambda: _dn_values(desc, pop, N, cfg), holds)


def _threshold_budget_text(budget):
    return (f"D_N pairs, N=1..{budget.threshold_max_N}, population n={budget.threshold_population} with "
            f"p_G1 in {budget.threshold_ps}; prefix cut-offs I={{N}} and every 1")


def check_closeness_threshold(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    s = _Search(PropertyId.P11, desc, _threshold_budget_text(budget))

    def holds(v):
        return strictly_greater(v[0], v[1])

    holds_up_to = budget.threshold_max_N
    for p, pop, preset, series in _threshold_series(desc, budget):
        s.instances += 1
        run = 0
        for N, cfg, v in series:
            if v is None:
                s.skipped += 1
                if N == 1:
                    break
                continue
            s.comparisons += 1
            if not holds(v):
                if N == 1:
                    return s.violated(_dn_counterexample(
                        desc, pop, p, preset, N, cfg, v,
                        f"m(first(D_1))={_fmt(v[0])} is not > m(last(D_1'))={_fmt(v[1])}", holds))
                break
            run = N
        holds_up_to = min(holds_up_to, run)
    return s.satisfied(threshold=1, details=s.details(f"inequality holds for every N <= {holds_up_to}"))


def check_deepness_threshold(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    s = _Search(PropertyId.P12, desc, _threshold_budget_text(budget))
    max_n = budget.threshold_max_N

    def holds(v):
        return strictly_greater(v[1], v[0])

    threshold = 1
    for p, pop, preset, series in _threshold_series(desc, budget):
        s.instances += 1
        start = max_n + 1
        for N, cfg, v in reversed(series):
            if v is None:
                s.skipped += 1
                continue
            s.comparisons += 1
            if not holds(v):
                if N == max_n:
                    return s.violated(_dn_counterexample(
                        desc, pop, p, preset, N, cfg, v,
                        f"m(first(D_N))={_fmt(v[0])} is not < m(last(D_N'))={_fmt(v[1])} at the largest N={N}",
                        holds))
                break
            start = N
        threshold = max(threshold, start)
    return s.satisfied(threshold=threshold,
                       details=s.details(f"inequality holds for every N in [{threshold}, {max_n}]; "
                                         f"larger N not examined"))


# -- P13 --------------------------------------------------------------------------

def _sensitivity_instances(budget: SearchBudget) -> Iterator[Instance]:
    # last(D_N') with I={N}, p_G1=0.8: prefix metrics score 0 there and stay 0 after appending
    pop = _spec_population(budget.threshold_population, budget.sensitivity_p)
    for N in range(1, budget.sensitivity_max_N + 1):
        _, d_n_prime = make_dn_pair(pop, N)
        yield Instance(pop, make_last(d_n_prime), budget.config.with_cutoffs(Cutoffs.of(N)),
                       f"last(D_N') with N={N}, p_G1={budget.sensitivity_p}")
    # three non-protected and one protected candidate, two of them ranked
    awrf_pop = _population(3, 1)
    ids = [awrf_pop.members(Group.NON_PROTECTED)[0].id, awrf_pop.members(Group.PROTECTED)[0].id]
    yield Instance(awrf_pop, Ranking.from_ids(awrf_pop, ids), budget.small_config, "pinned instance <g0,g1>")
    yield from small_subset_instances(budget, None, need_both=True, need_extra_g0=True)


def _lowest_unranked_g0(inst: Instance):
    for c in inst.pop.members(Group.NON_PROTECTED):
        if c.id not in inst.ranking.candidate_set:
            return c
    return None


def check_sensitivity(desc: MetricDescriptor, budget: SearchBudget) -> PropertyVerdict:
    s = _Search(PropertyId.P13, desc,
                f"all rankings n<{budget.exhaustive_max_n} of subsets holding both groups, uniform relevance; "
                f"pinned last(D_N') instances (I={{N}}, p_G1={budget.sensitivity_p}, N<={budget.sensitivity_max_N}) "
                f"and a 4-candidate instance; d' = lowest-id unranked G0")

    def holds(v):
        return strictly_greater(v[0], v[1])

    for inst in _sensitivity_instances(budget):
        d = _lowest_unranked_g0(inst)
        if d is None:
            continue
        longer = append(inst.ranking, d)

        def measure(inst=inst, longer=longer):
            return (inst.value(desc), inst.value(desc, longer))

        try:
            v = measure()
        except _SKIP_ERRORS:
            s.skipped += 1
            continue
        s.instances += 1
        s.comparisons += 1
        if not holds(v):
            ce = Counterexample(_describe(inst.pop, inst.cfg, inst.label), (inst.ranking, longer), v,
                                f"m(r')={_fmt(v[1])} is not < m(r)={_fmt(v[0])} after appending {d.id}",
                                measure, holds)
            return s.violated(ce)
    return s.satisfied()


# -- dispatch ---------------------------------------------------------------------

CHECKERS: dict[PropertyId, Callable[[MetricDescriptor, SearchBudget], PropertyVerdict]] = {
    PropertyId.P1: check_distinguishability,
    PropertyId.P2: check_boundedness,
    PropertyId.P3: check_monotonicity,
    PropertyId.P4: check_deepness,
    PropertyId.P5: check_intra_group_fairness,
    PropertyId.P6: check_linear_invariance,
    PropertyId.P7: check_random_optimality,
    PropertyId.P8: check_length_invariance,
    PropertyId.P9: check_proportion_invariance,
    PropertyId.P10: check_symmetric_penalties,
    PropertyId.P11: check_closeness_threshold,
    PropertyId.P12: check_deepness_threshold,
    PropertyId.P13: check_sensitivity,
}


def inapplicable_reason(prop: PropertyId, desc: MetricDescriptor) -> str | None:
    if prop in (PropertyId.P5, PropertyId.P6) and not desc.uses_relevance:
        return f"{desc.name} ignores relevance"
    if desc.name == "PSP" and prop in (PropertyId.P11, PropertyId.P12, PropertyId.P13):
        return "PSP is only defined when the full population is ranked"
    return None


def check_property(prop: PropertyId | str, metric, budget: SearchBudget = DEFAULT_BUDGET) -> PropertyVerdict:
    """Run the falsification search for one (property, metric) cell."""
    from .table import expected_status

    prop = prop if isinstance(prop, PropertyId) else PropertyId.parse(prop)
    desc = get_metric(metric)
    expected = expected_status(desc.name, prop)
    reason = inapplicable_reason(prop, desc)
    if reason is not None:
        return PropertyVerdict(prop, desc.name, Status.INAPPLICABLE, "none", details=reason, expected=expected)
    verdict = CHECKERS[prop](desc, budget)
    return PropertyVerdict(verdict.prop, verdict.metric, verdict.status, verdict.search_budget,
                           verdict.counterexample, verdict.regime, verdict.threshold, verdict.details, expected)

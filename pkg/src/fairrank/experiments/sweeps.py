"""Synthetic extreme-ranking sweeps and the relevance-transform sweeps on run files."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from ..core import Population, Ranking
from ..errors import CutoffError, NormalizerZeroError, UndefinedMetricError
from ..generators import PopulationSpec, make_dn_pair, make_first, make_last, make_population
from ..metrics import DEFAULT_CONFIG, METRIC_NAMES, Cutoffs, MetricConfig, evaluate_metric
from .output import UNDEFINED, Experiment, ExperimentRow
from .runfile import RunFile, rank_by_relevance

RELEVANCE_METRICS = ("DTD", "DTR", "DID", "DIR")


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = round((stop - start) / step)
    return tuple(round(start + i * step, 10) for i in range(count + 1))


@dataclass(frozen=True)
class SweepConfig:
    metric_config: MetricConfig = DEFAULT_CONFIG
    metrics: tuple[str, ...] = METRIC_NAMES
    length_grid: tuple[int, ...] = tuple(range(20, 501, 10))
    length_p: float = 0.3
    proportion_n: int = 100
    proportion_grid: tuple[float, ...] = _grid(0.10, 0.90, 0.02)
    closeness_N: tuple[int, ...] = tuple(range(1, 65))
    closeness_population: int = 1000
    closeness_p: float = 0.3
    closeness_p_awrf: float = 0.1
    closeness_cutoffs: Cutoffs = field(default_factory=lambda: Cutoffs.every(1))
    translation_c: tuple[float, ...] = (-0.09, -0.05, 0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0)
    rescaling_a: tuple[float, ...] = (0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0)
    seed: int = 0  # the sweeps are deterministic; kept so runs record the seed they were asked for


def _score(metric: str, pop: Population, r: Ranking, cfg: MetricConfig) -> float | str:
    try:
        return evaluate_metric(metric, pop, r, cfg)
    except (UndefinedMetricError, NormalizerZeroError, CutoffError):
        return UNDEFINED


def _extreme_rows(experiment: Experiment, pop: Population, n: int, p: float, cfg: SweepConfig):
    ds = pop.candidate_set()
    rankings = (("first", make_first(ds)), ("last", make_last(ds)))
    for metric in cfg.metrics:
        for kind, r in rankings:
            yield ExperimentRow(experiment, metric, _score(metric, pop, r, cfg.metric_config),
                                n=n, p=p, ranking_kind=kind)


def run_length_sweep(cfg: SweepConfig = SweepConfig()) -> Iterator[ExperimentRow]:
    """v_first and v_last for each population size at a fixed protected share."""
    for n in cfg.length_grid:
        pop = make_population(PopulationSpec(n, cfg.length_p))
        yield from _extreme_rows(Experiment.LENGTH, pop, n, cfg.length_p, cfg)


def run_proportion_sweep(cfg: SweepConfig = SweepConfig()) -> Iterator[ExperimentRow]:
    """v_first and v_last for each protected share at a fixed population size."""
    for p in cfg.proportion_grid:
        pop = make_population(PopulationSpec(cfg.proportion_n, p))
        yield from _extreme_rows(Experiment.PROPORTION, pop, cfg.proportion_n, p, cfg)


def run_closeness_sweep(cfg: SweepConfig = SweepConfig()) -> Iterator[ExperimentRow]:
    """``m(first(D_N))`` against ``m(last(D_N'))`` for each N.

    AWRF is evaluated on a population with protected share
    ``closeness_p_awrf``, every other metric on ``closeness_p``. PSP does not
    apply to subsets and is left out.
    """
    mcfg = cfg.metric_config.with_cutoffs(cfg.closeness_cutoffs)
    pops = {}
    for p in (cfg.closeness_p, cfg.closeness_p_awrf):
        pops[p] = make_population(PopulationSpec(cfg.closeness_population, p))
    metrics = [m for m in cfg.metrics if m != "PSP"]
    for N in cfg.closeness_N:
        for metric in metrics:
            p = cfg.closeness_p_awrf if metric == "AWRF" else cfg.closeness_p
            pop = pops[p]
            d_n, d_n_prime = make_dn_pair(pop, N)
            for kind, r in (("first", make_first(d_n)), ("last", make_last(d_n_prime))):
                yield ExperimentRow(Experiment.CLOSENESS, metric, _score(metric, pop, r, mcfg),
                                    n=2 * N, p=p, N=N, ranking_kind=kind)


def _transform_rows(experiment, run: RunFile, queries: Sequence[str], grid, transform, cfg: SweepConfig,
                    order: str):
    for query in queries:
        base = run.population(query)
        for x in grid:
            a, c = transform(x)
            pop = base.with_relevance(lambda y: a * y + c)
            if order == "file":
                r = Ranking.from_ids(pop, run.file_order(query))
            else:
                r = rank_by_relevance(pop)
            for metric in RELEVANCE_METRICS:
                yield ExperimentRow(experiment, metric, _score(metric, pop, r, cfg.metric_config),
                                    n=len(pop), a=a if experiment is Experiment.RESCALING else None,
                                    c=c if experiment is Experiment.TRANSLATION else None, query=query)


def run_translation_sweep(run: RunFile, queries: Sequence[str] | None = None, grid: Sequence[float] | None = None,
                          cfg: SweepConfig = SweepConfig(), order: str = "relevance") -> Iterator[ExperimentRow]:
    """DTD, DTR, DID and DIR after adding ``c`` to every relevance score.

    Each query's candidates form the population and are ranked by the
    translated relevance (descending, ties by id), or in file order with
    ``order="file"``.
    """
    queries = run.queries if queries is None else tuple(queries)
    grid = cfg.translation_c if grid is None else tuple(grid)
    return _transform_rows(Experiment.TRANSLATION, run, queries, grid, lambda c: (1.0, float(c)), cfg, order)


def run_rescaling_sweep(run: RunFile, queries: Sequence[str] | None = None, grid: Sequence[float] | None = None,
                        cfg: SweepConfig = SweepConfig(), order: str = "relevance") -> Iterator[ExperimentRow]:
    """As :func:`run_translation_sweep`, multiplying relevance by ``a > 0``."""
    queries = run.queries if queries is None else tuple(queries)
    grid = cfg.rescaling_a if grid is None else tuple(grid)
    if any(a <= 0 for a in grid):
        raise ValueError("rescaling factors must be positive")
    return _transform_rows(Experiment.RESCALING, run, queries, grid, lambda a: (float(a), 0.0), cfg, order)


SYNTHETIC_SWEEPS = {
    "length": run_length_sweep,
    "proportion": run_proportion_sweep,
    "closeness": run_closeness_sweep,
}
RUN_SWEEPS = {
    "translation": run_translation_sweep,
    "rescaling": run_rescaling_sweep,
}

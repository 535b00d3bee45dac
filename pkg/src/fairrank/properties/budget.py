"""Finite search families for the property checkers."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..metrics import DEFAULT_CONFIG, Cutoffs, MetricConfig


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = round((stop - start) / step)
    return tuple(round(start + i * step, 10) for i in range(count + 1))


@dataclass(frozen=True)
class SearchBudget:
    """Everything a checker may look at before declaring "no counterexample".

    Small exhaustive families use ``small_cutoffs`` for prefix metrics; the
    length and proportion grids use ``grid_cutoffs``.
    """

    name: str = "default"
    seed: int = 0
    config: MetricConfig = DEFAULT_CONFIG
    # Setting-1 grids
    length_grid: tuple[int, ...] = tuple(range(20, 501, 10))
    length_p: float = 0.3
    proportion_n: int = 100
    proportion_grid: tuple[float, ...] = _grid(0.10, 0.90, 0.02)
    grid_cutoffs: Cutoffs = field(default_factory=lambda: Cutoffs.every(10))
    small_cutoffs: Cutoffs = field(default_factory=lambda: Cutoffs.every(1))
    # exhaustive and random families
    exhaustive_max_n: int = 6
    exhaustive_relevance: tuple[float, ...] = (0.5, 1.0)
    subset_extras: tuple[tuple[int, int], ...] = ((1, 0), (0, 1), (1, 1), (2, 1))
    random_instances: int = 200
    random_max_n: int = 50
    random_relevance: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    pairs_per_instance: int = 40
    # P2
    magnitude_bound: float = 100.0
    growth_sizes: tuple[int, ...] = (2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)
    downscale_factors: tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-6)
    # P6
    scale_a: tuple[float, ...] = (0.5, 1.0, 2.0, 10.0)
    translate_c: tuple[float, ...] = (-0.09, 0.0, 0.5, 1.0, 5.0)
    # P7
    expectation_max_n: int = 6
    monte_carlo: tuple[tuple[int, int], ...] = ((10, 3),)  # (n, |G1|) pairs beyond the exact range
    monte_carlo_samples: int = 100_000
    # P11-P13
    threshold_population: int = 1000
    threshold_ps: tuple[float, ...] = (0.1, 0.3, 0.5, 0.8)
    threshold_max_N: int = 64
    sensitivity_p: float = 0.8
    sensitivity_max_N: int = 10

    def with_config(self, config: MetricConfig) -> "SearchBudget":
        return replace(self, config=config)

    def with_seed(self, seed: int) -> "SearchBudget":
        return replace(self, seed=seed)

    @property
    def small_config(self) -> MetricConfig:
        return self.config.with_cutoffs(self.small_cutoffs)

    @property
    def grid_config(self) -> MetricConfig:
        return self.config.with_cutoffs(self.grid_cutoffs)


DEFAULT_BUDGET = SearchBudget()

QUICK_BUDGET = SearchBudget(
    name="quick",
    length_grid=tuple(range(20, 501, 80)),
    proportion_grid=_grid(0.10, 0.90, 0.10),
    exhaustive_max_n=5,
    random_instances=30,
    random_max_n=30,
    pairs_per_instance=10,
    growth_sizes=(2, 8, 32, 128, 512),
    monte_carlo=(),
    threshold_ps=(0.1, 0.3, 0.8),
    threshold_max_N=32,
)

BUDGETS = {"default": DEFAULT_BUDGET, "quick": QUICK_BUDGET}

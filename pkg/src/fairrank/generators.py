"""Synthetic populations and the structured ranking families used by the checkers."""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterator, Sequence

from .core import Candidate, CandidateSet, Group, Population, Ranking
from .errors import CapacityError, SizeGuardError

ENUMERATION_MAX_N = 9


class RelevanceMode(enum.Enum):
    UNIFORM = "uniform"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class PopulationSpec:
    """Size, protected share and relevance of a synthetic population.

    With ``relevance_mode=EXPLICIT`` the ``relevances`` tuple lists the
    protected candidates' scores first, then the non-protected ones, each
    in id order.
    """

    n: int
    p_protected: float
    relevance_mode: RelevanceMode = RelevanceMode.UNIFORM
    relevances: tuple[float, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a population needs at least two candidates")
        if not 0.0 < self.p_protected < 1.0:
            raise ValueError(f"p_protected must lie in (0, 1), got {self.p_protected}")
        if self.relevance_mode is RelevanceMode.EXPLICIT and len(self.relevances) != self.n:
            raise ValueError(f"expected {self.n} relevances, got {len(self.relevances)}")

    @property
    def counts(self) -> tuple[int, int]:
        """``(|G0|, |G1|)`` after rounding half away from zero and clamping to >= 1."""
        n1 = int((Decimal(str(self.p_protected)) * self.n).quantize(Decimal(1), rounding=ROUND_HALF_UP))
        n1 = min(max(n1, 1), self.n - 1)
        return self.n - n1, n1


def protected_id(i: int, width: int = 5) -> str:
    return f"p{i:0{width}d}"


def nonprotected_id(i: int, width: int = 5) -> str:
    return f"n{i:0{width}d}"


def make_population_counts(n0: int, n1: int, relevance: Sequence[float] | None = None) -> Population:
    """Population with ids ``p00000..`` (protected) and ``n00000..`` (non-protected)."""
    if n0 < 1 or n1 < 1:
        raise ValueError("both groups need at least one candidate")
    ys = list(relevance) if relevance is not None else [1.0] * (n0 + n1)
    if len(ys) != n0 + n1:
        raise ValueError("relevance length does not match the population size")
    cands = [Candidate(protected_id(i), Group.PROTECTED, float(ys[i])) for i in range(n1)]
    cands += [Candidate(nonprotected_id(i), Group.NON_PROTECTED, float(ys[n1 + i])) for i in range(n0)]
    return Population(tuple(cands))


def make_population(spec: PopulationSpec) -> Population:
    n0, n1 = spec.counts
    ys = spec.relevances if spec.relevance_mode is RelevanceMode.EXPLICIT else None
    return make_population_counts(n0, n1, ys)


def population_from_pattern(pattern: Sequence[int], relevance: Sequence[float] | None = None) -> tuple[Population, Ranking]:
    """Population ranked in full in the given group pattern (1 = protected).

    Ids are assigned in order of appearance, so the returned ranking lists
    each group in ascending id order.
    """
    ys = list(relevance) if relevance is not None else [1.0] * len(pattern)
    width = max(5, len(str(len(pattern))))
    counters = [0, 0]
    cands = []
    for g, y in zip(pattern, ys):
        make_id = protected_id if g else nonprotected_id
        cands.append(Candidate(make_id(counters[g], width), Group(g), float(y)))
        counters[g] += 1
    pop = Population(tuple(cands))
    return pop, Ranking(pop.candidate_set(), tuple(cands))


def _block_ranking(ds: CandidateSet, top: Group) -> Ranking:
    cands = ds.sorted_candidates
    order = [c for c in cands if c.group is top] + [c for c in cands if c.group is not top]
    return Ranking(ds, tuple(order))


def make_first(ds: CandidateSet) -> Ranking:
    """Representative of R_first(D): protected block first, ids ascending within groups."""
    return _block_ranking(ds, Group.PROTECTED)


def make_last(ds: CandidateSet) -> Ranking:
    """Representative of R_last(D): non-protected block first."""
    return _block_ranking(ds, Group.NON_PROTECTED)


def is_first(r: Ranking) -> bool:
    g = r.groups
    return list(g) == sorted(g, reverse=True)


def is_last(r: Ranking) -> bool:
    g = r.groups
    return list(g) == sorted(g)


def make_dn_pair(pop: Population, N: int) -> tuple[CandidateSet, CandidateSet]:
    """``(D_N, D_N')``: 2N candidates each, with 1 and N protected members.

    Members are the lowest ids of each group.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    prot = pop.members(Group.PROTECTED)
    nonp = pop.members(Group.NON_PROTECTED)
    if len(prot) < N or len(nonp) < 2 * N - 1:
        raise CapacityError(
            f"D_N pair for N={N} needs {N} protected and {2 * N - 1} non-protected candidates, "
            f"population has {len(prot)} and {len(nonp)}"
        )
    d_n = CandidateSet(pop, frozenset([prot[0].id] + [c.id for c in nonp[: 2 * N - 1]]))
    d_n_prime = CandidateSet(pop, frozenset([c.id for c in prot[:N]] + [c.id for c in nonp[:N]]))
    return d_n, d_n_prime


def enumerate_rankings(ds: CandidateSet) -> Iterator[Ranking]:
    """All n! rankings of ``ds`` in lexicographic order of their id sequences."""
    if ds.n > ENUMERATION_MAX_N:
        raise SizeGuardError(f"refusing to enumerate {ds.n}! rankings (limit n <= {ENUMERATION_MAX_N})")
    for perm in itertools.permutations(ds.sorted_candidates):
        yield Ranking(ds, perm)


def sample_ranking(ds: CandidateSet, seed: int | random.Random) -> Ranking:
    """Uniform random ranking of ``ds`` (seeded Fisher-Yates shuffle)."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    order = list(ds.sorted_candidates)
    rng.shuffle(order)
    return Ranking(ds, tuple(order))


def relabel_groups(pop: Population) -> Population:
    """Swap protected and non-protected labels, keeping ids and relevance."""
    return Population(tuple(Candidate(c.id, c.group.other, c.relevance) for c in pop))


def subset_instance(pattern: Sequence[int], relevance: Sequence[float] | None = None,
                    extra: tuple[int, int] = (1, 1), extra_relevance: float = 1.0) -> tuple[Population, Ranking]:
    """A ranking of a strict subset: ``pattern`` is ranked, ``extra = (e0, e1)``
    further candidates per group stay unranked in the population."""
    e0, e1 = extra
    full = list(pattern) + [0] * e0 + [1] * e1
    ys = list(relevance) if relevance is not None else [1.0] * len(pattern)
    ys += [extra_relevance] * (e0 + e1)
    pop, whole = population_from_pattern(full, ys)
    ranked = whole.order[: len(pattern)]
    return pop, Ranking(pop.candidate_set(c.id for c in ranked), ranked)

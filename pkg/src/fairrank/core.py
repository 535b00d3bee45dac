"""Populations, candidate sets and rankings.

All positions are 1-based. Every type here is an immutable value object;
the ranking operations return new rankings and never touch their input.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DuplicateError, MembershipError, PositionError


class Group(enum.IntEnum):
    NON_PROTECTED = 0
    PROTECTED = 1

    @property
    def other(self) -> "Group":
        return Group(1 - self)

    @property
    def label(self) -> str:
        return f"G{int(self)}"


@dataclass(frozen=True)
class Candidate:
    id: str
    group: Group
    relevance: float = 1.0

    def __post_init__(self):
        if not isinstance(self.group, Group):
            object.__setattr__(self, "group", Group(self.group))
        if not math.isfinite(self.relevance):
            raise ValueError(f"candidate {self.id!r}: relevance must be finite, got {self.relevance}")


@dataclass(frozen=True, eq=False)
class Population:
    """The full candidate universe, with both groups nonempty."""

    candidates: tuple[Candidate, ...]

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        index = {}
        for c in self.candidates:
            if c.id in index:
                raise DuplicateError(f"duplicate candidate id {c.id!r}")
            index[c.id] = c
        object.__setattr__(self, "_index", index)
        if self.protected_count == 0 or self.nonprotected_count == 0:
            raise ValueError("a population needs at least one candidate of each group")

    def __eq__(self, other):
        if not isinstance(other, Population):
            return NotImplemented
        return self is other or self.candidates == other.candidates

    def __hash__(self):
        return hash(self.candidates)

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __contains__(self, item):
        key = item.id if isinstance(item, Candidate) else item
        return key in self._index

    def __getitem__(self, candidate_id: str) -> Candidate:
        try:
            return self._index[candidate_id]
        except KeyError:
            raise MembershipError(f"{candidate_id!r} is not in the population") from None

    @cached_property
    def protected_count(self) -> int:
        return sum(1 for c in self.candidates if c.group is Group.PROTECTED)

    @cached_property
    def nonprotected_count(self) -> int:
        return len(self.candidates) - self.protected_count

    def group_size(self, g: Group) -> int:
        return self.protected_count if g is Group.PROTECTED else self.nonprotected_count

    @cached_property
    def p_groups(self) -> tuple[float, float]:
        """``(p_G0, p_G1)``, the group shares in the population."""
        n = len(self.candidates)
        return (self.nonprotected_count / n, self.protected_count / n)

    def share(self, g: Group) -> float:
        return self.p_groups[int(g)]

    @cached_property
    def _relevance_sums(self) -> tuple[float, float]:
        sums = [[], []]
        for c in self.candidates:
            sums[c.group].append(c.relevance)
        return (math.fsum(sums[0]), math.fsum(sums[1]))

    def mean_relevance(self, g: Group) -> float:
        """Average relevance ``Y(G)`` over the whole population group."""
        return self._relevance_sums[int(g)] / self.group_size(g)

    def members(self, g: Group) -> list[Candidate]:
        return sorted((c for c in self.candidates if c.group is g), key=lambda c: c.id)

    def with_relevance(self, fn) -> "Population":
        """Copy of the population with every relevance ``y`` replaced by ``fn(y)``."""
        return Population(tuple(Candidate(c.id, c.group, float(fn(c.relevance))) for c in self.candidates))

    def candidate_set(self, ids: Iterable[str] | None = None) -> "CandidateSet":
        if ids is None:
            ids = (c.id for c in self.candidates)
        return CandidateSet(self, frozenset(ids))


@dataclass(frozen=True)
class CandidateSet:
    population: Population
    members: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise ValueError("a candidate set needs at least one member")
        for m in self.members:
            if m not in self.population:
                raise MembershipError(f"{m!r} is not in the population")

    @property
    def n(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, item):
        key = item.id if isinstance(item, Candidate) else item
        return key in self.members

    @cached_property
    def sorted_candidates(self) -> tuple[Candidate, ...]:
        """Members in ascending id order."""
        return tuple(self.population[m] for m in sorted(self.members))

    def group_count(self, g: Group) -> int:
        return sum(1 for c in self.sorted_candidates if c.group is g)

    @property
    def is_full_population(self) -> bool:
        return len(self.members) == len(self.population)

    def with_member(self, d: Candidate) -> "CandidateSet":
        return CandidateSet(self.population, self.members | {d.id})


@dataclass(frozen=True)
class Ranking:
    """A total order over a candidate set; ``order[k - 1]`` is the candidate at rank k."""

    candidate_set: CandidateSet
    order: tuple[Candidate, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        ids = [c.id for c in self.order]
        if len(ids) != len(set(ids)) or set(ids) != self.candidate_set.members:
            raise ValueError("order must be a permutation of the candidate set")
        pop = self.candidate_set.population
        for c in self.order:
            if pop[c.id] != c:
                raise MembershipError(f"candidate {c.id!r} differs from the population record")

    @classmethod
    def from_ids(cls, population: Population, ids: Sequence[str]) -> "Ranking":
        ds = CandidateSet(population, frozenset(ids))
        return cls(ds, tuple(population[i] for i in ids))

    @property
    def population(self) -> Population:
        return self.candidate_set.population

    @property
    def n(self) -> int:
        return len(self.order)

    def __len__(self):
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.order)

    @property
    def groups(self) -> tuple[int, ...]:
        """Group labels (0/1) by position."""
        return tuple(int(c.group) for c in self.order)

    def at(self, k: int) -> Candidate:
        """``r(k)``."""
        _check_position(k, self.n)
        return self.order[k - 1]

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {c.id: k for k, c in enumerate(self.order, start=1)}

    def position(self, d: Candidate | str) -> int:
        """``r^-1(d)``."""
        key = d.id if isinstance(d, Candidate) else d
        try:
            return self._positions[key]
        except KeyError:
            raise MembershipError(f"{key!r} is not ranked") from None

    def ranked_higher(self, d: Candidate | str, other: Candidate | str) -> bool:
        return self.position(d) < self.position(other)

    def rebase(self, population: Population) -> "Ranking":
        """The same order of ids over another population (e.g. after a relevance transform)."""
        return Ranking.from_ids(population, self.ids)

    def __repr__(self):
        return "Ranking<" + ",".join(self.ids) + ">"


def _check_position(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise PositionError(f"position {k} outside 1..{n}")


def swap(r: Ranking, i: int, j: int) -> Ranking:
    """``r_{i<->j}``: exchange the candidates at positions i < j."""
    _check_position(i, r.n)
    _check_position(j, r.n)
    if not i < j:
        raise PositionError(f"swap needs i < j, got i={i}, j={j}")
    order = list(r.order)
    order[i - 1], order[j - 1] = order[j - 1], order[i - 1]
    return Ranking(r.candidate_set, tuple(order))


def append(r: Ranking, d: Candidate | str) -> Ranking:
    """``<r(1), ..., r(n), d>``."""
    pop = r.population
    key = d.id if isinstance(d, Candidate) else d
    if key not in pop:
        raise MembershipError(f"{key!r} is not in the population")
    if key in r.candidate_set:
        raise DuplicateError(f"{key!r} is already ranked")
    cand = pop[key]
    return Ranking(r.candidate_set.with_member(cand), r.order + (cand,))


def invert(r: Ranking) -> Ranking:
    """Reverse the ranking: position k receives ``r(n + 1 - k)``."""
    return Ranking(r.candidate_set, r.order[::-1])


def prefix_proportion(r: Ranking, k: int, g: Group) -> float:
    """``p_G^k(r)``, the share of group g among the top-k candidates."""
    _check_position(k, r.n)
    g = Group(g)
    return sum(1 for c in r.order[:k] if c.group is g) / k

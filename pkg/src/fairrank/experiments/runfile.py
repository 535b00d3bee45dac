"""Relevance-scored run files: ``query_id,candidate_id,group,relevance``."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from ..core import Candidate, Group, Population, Ranking
from ..errors import ParseError, ValidationError

COLUMNS = ("query_id", "candidate_id", "group", "relevance")


@dataclass(frozen=True)
class RunRecord:
    query_id: str
    candidate_id: str
    group: Group
    relevance: float
    line: int


@dataclass(frozen=True)
class RunFile:
    records: tuple[RunRecord, ...]

    def __len__(self):
        return len(self.records)

    @property
    def queries(self) -> tuple[str, ...]:
        """Query ids in order of first appearance."""
        return tuple(dict.fromkeys(r.query_id for r in self.records))

    def query_records(self, query: str) -> list[RunRecord]:
        recs = [r for r in self.records if r.query_id == query]
        if not recs:
            raise KeyError(f"query {query!r} not in run file")
        return recs

    def population(self, query: str) -> Population:
        """All candidates listed for ``query``; both groups must be present."""
        recs = self.query_records(query)
        groups = {r.group for r in recs}
        if len(groups) < 2:
            missing = Group.PROTECTED if Group.PROTECTED not in groups else Group.NON_PROTECTED
            raise ValidationError(recs[0].line, f"query {query!r} has no candidate in group {int(missing)}")
        return Population(tuple(Candidate(r.candidate_id, r.group, r.relevance) for r in recs))

    def file_order(self, query: str) -> tuple[str, ...]:
        return tuple(r.candidate_id for r in self.query_records(query))


def rank_by_relevance(pop: Population) -> Ranking:
    """Full ranking by relevance, descending; ties go to the smaller id."""
    order = sorted(pop, key=lambda c: (-c.relevance, c.id))
    return Ranking(pop.candidate_set(), tuple(order))


def load_run_file(path: str | Path) -> RunFile:
    """Parse and validate a run file; errors carry 1-based line numbers (header is line 1)."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, "empty file, expected a header") from None
        except csv.Error as exc:
            raise ParseError(1, str(exc)) from None
        header = [h.strip() for h in header]
        if tuple(header) != COLUMNS:
            raise ParseError(1, f"header must be {','.join(COLUMNS)}, got {','.join(header)}")
        records = []
        seen = {}
        try:
            for fields in reader:
                line = reader.line_num
                if not fields or all(not f.strip() for f in fields):
                    continue
                if len(fields) != len(COLUMNS):
                    raise ParseError(line, f"expected {len(COLUMNS)} fields, got {len(fields)}")
                query, cand, group, rel = (f.strip() for f in fields)
                if not query or not cand:
                    raise ValidationError(line, "query_id and candidate_id must be nonempty")
                if group not in ("0", "1"):
                    raise ValidationError(line, f"group must be 0 or 1, got {group!r}")
                try:
                    y = float(rel)
                except ValueError:
                    raise ParseError(line, f"relevance {rel!r} is not a number") from None
                if not math.isfinite(y):
                    raise ValidationError(line, f"relevance must be finite, got {rel!r}")
                key = (query, cand)
                if key in seen:
                    raise ValidationError(line, f"duplicate candidate {cand!r} for query {query!r} "
                                                f"(first seen on line {seen[key]})")
                seen[key] = line
                records.append(RunRecord(query, cand, Group(int(group)), y, line))
        except csv.Error as exc:
            raise ParseError(reader.line_num, str(exc)) from None
    return RunFile(tuple(records))

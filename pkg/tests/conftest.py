import pytest
from hypothesis import settings
from hypothesis import strategies as st

from fairrank.generators import population_from_pattern, subset_instance

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


@st.composite
def group_patterns(draw, min_size=2, max_size=8):
    """Group patterns (1 = protected) containing both groups."""
    pat = draw(st.lists(st.integers(0, 1), min_size=min_size, max_size=max_size))
    if len(set(pat)) < 2:
        i = draw(st.integers(0, len(pat) - 1))
        pat[i] ^= 1
    return pat


relevance_levels = st.sampled_from([0.25, 0.5, 0.75, 1.0])


@st.composite
def full_instances(draw, max_size=8, relevance=None):
    pat = draw(group_patterns(max_size=max_size))
    ys = None if relevance is None else draw(st.lists(relevance, min_size=len(pat), max_size=len(pat)))
    return population_from_pattern(pat, ys)


@st.composite
def subset_instances(draw, max_size=8, relevance=None):
    pat = draw(group_patterns(max_size=max_size))
    ys = None if relevance is None else draw(st.lists(relevance, min_size=len(pat), max_size=len(pat)))
    extra = (draw(st.integers(1, 3)), draw(st.integers(0, 3)))
    return subset_instance(pat, ys, extra)


@pytest.fixture
def two_candidates():
    """Protected candidate first, one non-protected second."""
    return population_from_pattern([1, 0])


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, ok: bool, text: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

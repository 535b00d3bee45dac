import json

import pytest

from fairrank.metrics import METRIC_NAMES
from fairrank.properties import (
    GOLDEN,
    QUICK_BUDGET,
    PropertyId,
    Status,
    check_property,
    expected_status,
    golden_mismatches,
    render_text,
    satisfaction_table,
    to_json,
)


@pytest.fixture(scope="module")
def quick_table():
    return satisfaction_table(QUICK_BUDGET)


class TestPropertyId:
    @pytest.mark.parametrize("text", ["P4", "p4", "4"])
    def test_parse(self, text):
        assert PropertyId.parse(text) is PropertyId.P4

    def test_parse_unknown(self):
        with pytest.raises(KeyError):
            PropertyId.parse("P14")

    def test_numbering(self):
        assert [p.number for p in PropertyId] == list(range(1, 14))


class TestGolden:
    def test_shape(self):
        assert set(GOLDEN) == set(METRIC_NAMES)
        assert all(len(row) == 13 for row in GOLDEN.values())

    def test_known_cells(self):
        assert expected_status("PSP", PropertyId.P4) is Status.VIOLATED
        assert expected_status("rND", PropertyId.P5) is Status.INAPPLICABLE
        assert expected_status("ED", PropertyId.P2) is Status.SATISFIED
        assert expected_status("nDCG", PropertyId.P1) is None


class TestQuickTable:
    def test_matches_golden(self, quick_table):
        bad = golden_mismatches(quick_table)
        assert not bad, [(v.metric, v.prop.name, v.status.value) for v in bad]

    def test_every_violation_reproduces(self, quick_table):
        for row in quick_table.values():
            for v in row.values():
                if v.status is Status.VIOLATED:
                    assert v.counterexample.reproduces(), (v.metric, v.prop.name)

    def test_inapplicable_has_no_counterexample(self, quick_table):
        for row in quick_table.values():
            for v in row.values():
                if v.status is Status.INAPPLICABLE:
                    assert v.counterexample is None
                    assert v.details

    def test_render(self, quick_table):
        text = render_text(quick_table)
        lines = text.splitlines()
        assert len(lines) == 12
        assert lines[0].split() == [p.name for p in PropertyId]
        assert lines[-1].split()[0] == "PSP"

    def test_json_round_trip(self, quick_table):
        doc = json.loads(to_json(quick_table, QUICK_BUDGET))
        assert doc["budget"] == "quick"
        assert doc["cells"]["PSP"]["P4"]["status"] == "violated"
        assert "counterexample" in doc["cells"]["PSP"]["P4"]


class TestCells:
    """Spot checks whose counterexamples are known in closed form."""

    def test_psp_symmetric_penalties(self):
        v = check_property("P4", "PSP", QUICK_BUDGET)
        assert v.status is Status.VIOLATED
        assert v.counterexample.reproduces()

    def test_prefix_metrics_not_distinguishing(self):
        for m in ("rND", "rRD", "rKL"):
            v = check_property(PropertyId.P1, m, QUICK_BUDGET)
            assert v.status is Status.VIOLATED

    def test_er_unbounded(self):
        v = check_property(PropertyId.P2, "ER", QUICK_BUDGET)
        assert v.status is Status.VIOLATED

    def test_ed_closeness_threshold(self):
        v = check_property(PropertyId.P11, "ED", QUICK_BUDGET)
        assert v.status is Status.SATISFIED
        assert v.threshold == 1

    def test_ed_deepness_threshold(self):
        v = check_property(PropertyId.P12, "ER", QUICK_BUDGET)
        assert v.status is Status.SATISFIED
        assert v.threshold is not None and v.threshold <= 3

    def test_awrf_deepness_counterexample(self):
        v = check_property(PropertyId.P8, "AWRF", QUICK_BUDGET)
        assert v.status is Status.VIOLATED
        assert v.counterexample.reproduces()

    def test_relevance_properties_inapplicable_to_ed(self):
        v = check_property(PropertyId.P6, "ED", QUICK_BUDGET)
        assert v.status is Status.INAPPLICABLE

    def test_dtd_rescaling_violated(self):
        v = check_property(PropertyId.P6, "DTD", QUICK_BUDGET)
        assert v.status is Status.VIOLATED
        assert v.counterexample.reproduces()

    def test_psp_random_optimality(self):
        v = check_property(PropertyId.P7, "PSP", QUICK_BUDGET)
        assert v.status is Status.SATISFIED

    def test_expected_attached(self):
        v = check_property(PropertyId.P1, "ED", QUICK_BUDGET)
        assert v.expected is Status.SATISFIED and v.matches_expected

    def test_summary_mentions_budget(self):
        v = check_property(PropertyId.P1, "ED", QUICK_BUDGET)
        assert "no counterexample within budget" in v.summary()


def test_seed_changes_nothing_in_the_verdicts():
    a = satisfaction_table(QUICK_BUDGET.with_seed(1), ["ED", "PSP"])
    b = satisfaction_table(QUICK_BUDGET.with_seed(2), ["ED", "PSP"])
    assert {m: {p: v.status for p, v in r.items()} for m, r in a.items()} == \
        {m: {p: v.status for p, v in r.items()} for m, r in b.items()}

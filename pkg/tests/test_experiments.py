import io
import json

import pytest

from fairrank.errors import ParseError, ValidationError
from fairrank.experiments import (
    HEADER,
    UNDEFINED,
    Experiment,
    ExperimentRow,
    SweepConfig,
    load_run_file,
    rank_by_relevance,
    rows_to_csv,
    run_closeness_sweep,
    run_length_sweep,
    run_proportion_sweep,
    run_rescaling_sweep,
    run_translation_sweep,
    write_json,
)
from fairrank.metrics import evaluate_metric, position_bias

RUN = """query_id,candidate_id,group,relevance
q1,a,1,0.9
q1,b,0,0.4
q2,x,0,0.7
q2,y,1,0.2
q2,z,0,0.5
"""


@pytest.fixture
def run_path(tmp_path):
    path = tmp_path / "run.csv"
    path.write_text(RUN)
    return path


def _write(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    return path


class TestRunFile:
    def test_load(self, run_path):
        run = load_run_file(run_path)
        assert run.queries == ("q1", "q2")
        assert len(run.population("q2")) == 3
        assert run.file_order("q2") == ("x", "y", "z")

    def test_rank_by_relevance(self, run_path):
        pop = load_run_file(run_path).population("q2")
        assert rank_by_relevance(pop).ids == ("x", "z", "y")

    def test_ties_go_to_smaller_id(self, tmp_path):
        run = load_run_file(_write(tmp_path, "query_id,candidate_id,group,relevance\nq,b,1,1\nq,a,0,1\n"))
        assert rank_by_relevance(run.population("q")).ids == ("a", "b")

    def test_unknown_query(self, run_path):
        with pytest.raises(KeyError):
            load_run_file(run_path).population("q9")

    @pytest.mark.parametrize("text,line,exc", [
        ("", 1, ParseError),
        ("query,candidate,group,rel\n", 1, ParseError),
        ("query_id,candidate_id,group,relevance\nq,a,1\n", 2, ParseError),
        ("query_id,candidate_id,group,relevance\nq,a,1,0.5\nq,b,0,high\n", 3, ParseError),
        ("query_id,candidate_id,group,relevance\nq,a,2,0.5\n", 2, ValidationError),
        ("query_id,candidate_id,group,relevance\nq,a,1,nan\n", 2, ValidationError),
        ("query_id,candidate_id,group,relevance\nq,a,1,1\nq,b,0,1\nq,a,0,1\n", 4, ValidationError),
        ("query_id,candidate_id,group,relevance\n,a,1,1\n", 2, ValidationError),
    ])
    def test_errors_carry_line(self, tmp_path, text, line, exc):
        with pytest.raises(exc) as info:
            load_run_file(_write(tmp_path, text))
        assert info.value.line == line

    def test_duplicate_names_first_line(self, tmp_path):
        text = "query_id,candidate_id,group,relevance\nq,a,1,1\nq,b,0,1\nq,a,0,1\n"
        with pytest.raises(ValidationError, match="line 2"):
            load_run_file(_write(tmp_path, text))

    def test_single_group_query(self, tmp_path):
        run = load_run_file(_write(tmp_path, "query_id,candidate_id,group,relevance\nq,a,1,1\nq,b,1,1\n"))
        with pytest.raises(ValidationError):
            run.population("q")


class TestRows:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            ExperimentRow(Experiment.LENGTH, "ED", float("nan"))

    def test_undefined_marker(self):
        row = ExperimentRow(Experiment.LENGTH, "ER", UNDEFINED, n=4)
        assert not row.is_defined
        assert row.cells()[-1] == UNDEFINED

    def test_csv_header_and_floats(self):
        row = ExperimentRow(Experiment.LENGTH, "ED", 0.1 + 0.2, n=20, p=0.3, ranking_kind="first")
        text = rows_to_csv([row])
        header, line = text.splitlines()
        assert tuple(header.split(",")) == HEADER
        assert float(line.split(",")[-1]) == 0.1 + 0.2

    def test_json(self):
        buf = io.StringIO()
        write_json([ExperimentRow(Experiment.LENGTH, "ED", 0.5, n=2)], buf)
        assert json.loads(buf.getvalue())[0]["value"] == 0.5


class TestTranslation:
    def test_zero_shift_is_identity(self, run_path):
        run = load_run_file(run_path)
        rows = list(run_translation_sweep(run, grid=[0.0]))
        for row in rows:
            pop = run.population(row.query)
            assert row.value == evaluate_metric(row.metric, pop, rank_by_relevance(pop))

    @pytest.mark.parametrize("c", [0.0, 0.1, 0.5, 2.0])
    def test_two_candidate_dtr_closed_form(self, run_path, c):
        # Protected a (0.9) outranks b (0.4): Exp(G1) = 1, Exp(G0) = b(2).
        run = load_run_file(run_path)
        (row,) = [r for r in run_translation_sweep(run, ["q1"], [c]) if r.metric == "DTR"]
        expected = (1 / position_bias(2)) * (0.4 + c) / (0.9 + c)
        assert row.value == pytest.approx(expected, rel=1e-12)

    def test_metrics_and_columns(self, run_path):
        rows = list(run_translation_sweep(load_run_file(run_path), ["q2"], [0.5]))
        assert [r.metric for r in rows] == ["DTD", "DTR", "DID", "DIR"]
        assert all(r.c == 0.5 and r.a is None and r.n == 3 for r in rows)

    def test_file_order(self, run_path):
        run = load_run_file(run_path)
        by_file = list(run_translation_sweep(run, ["q2"], [0.0], order="file"))
        by_rel = list(run_translation_sweep(run, ["q2"], [0.0]))
        assert by_file[0].value != by_rel[0].value


class TestRescaling:
    def test_ratio_metrics_invariant(self, run_path):
        rows = list(run_rescaling_sweep(load_run_file(run_path), ["q2"], [0.5, 1.0, 4.0]))
        for metric in ("DTR", "DID", "DIR"):
            vals = [r.value for r in rows if r.metric == metric]
            assert max(vals) == pytest.approx(min(vals), rel=1e-9)

    def test_rejects_nonpositive(self, run_path):
        with pytest.raises(ValueError):
            list(run_rescaling_sweep(load_run_file(run_path), grid=[0.0]))


SMALL = SweepConfig(length_grid=(20, 40), proportion_grid=(0.3, 0.5), closeness_N=(1, 2, 3))


class TestSyntheticSweeps:
    def test_length_rows(self):
        rows = list(run_length_sweep(SMALL))
        assert len(rows) == 2 * 11 * 2
        assert {r.ranking_kind for r in rows} == {"first", "last"}

    def test_proportion_psp_extremes(self):
        rows = [r for r in run_proportion_sweep(SMALL) if r.metric == "PSP"]
        assert {(r.ranking_kind, r.value) for r in rows} == {("first", 1.0), ("last", -1.0)}

    def test_closeness_excludes_psp(self):
        rows = list(run_closeness_sweep(SMALL))
        assert "PSP" not in {r.metric for r in rows}
        assert {r.N for r in rows} == {1, 2, 3}
        assert all(r.n == 2 * r.N for r in rows)

    def test_closeness_awrf_population(self):
        rows = list(run_closeness_sweep(SMALL))
        assert {r.p for r in rows if r.metric == "AWRF"} == {0.1}
        assert {r.p for r in rows if r.metric == "ED"} == {0.3}

    def test_deterministic(self):
        assert rows_to_csv(run_closeness_sweep(SMALL)) == rows_to_csv(run_closeness_sweep(SMALL))

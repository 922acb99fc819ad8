"""QA suite execution and cost/time reporting from persisted artifacts."""

import json

import pytest

from fastrag.evalharness import (CostReport, QaItem, build_cost_report,
                                 load_qa_items, render_comparison, run_qa_suite)
from fastrag.extraction import EntityRecord
from fastrag.gateway import RetryPolicy, UsageLedger, UsageRecord
from fastrag.kg import build_graph

from .conftest import scripted_gateway, write_fixtures

POLICY = RetryPolicy()


@pytest.fixture(scope="module")
def graph():
    return build_graph([EntityRecord("Device", {"hostname": "r1"}, ["hostname r1"])])


class TestLoadQaItems:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "qa.json"
        p.write_text(json.dumps([
            {"question": "Q1?", "reference_answer": "A1"},
            {"question": "Q2?"}]))
        items = load_qa_items(p)
        assert items == [QaItem("Q1?", "A1"), QaItem("Q2?")]

    def test_non_array_rejected(self, tmp_path):
        p = tmp_path / "qa.json"
        p.write_text('{"question": "Q?"}')
        with pytest.raises(ValueError, match="array"):
            load_qa_items(p)

    def test_empty_question_rejected(self, tmp_path):
        p = tmp_path / "qa.json"
        p.write_text(json.dumps([{"question": "ok?"}, {"reference_answer": "x"}]))
        with pytest.raises(ValueError, match="item 1"):
            load_qa_items(p)

    def test_bundled_qa_files_load(self):
        from .conftest import FIXTURES
        for name, count in [("configs_questions.json", 8),
                            ("logs_questions.json", 16)]:
            items = load_qa_items(FIXTURES / "qa" / name)
            assert len(items) == count
            assert all(i.question and i.reference_answer for i in items)


class TestRunQaSuite:
    def test_matrix_dimensions_and_ids(self, graph, tmp_path):
        files = {}
        for n in range(1, 3):
            files[f"query_graph-{n}"] = "MATCH (d:Device) RETURN d.hostname"
            files[f"query_text-{n}"] = "hostname"
        files.update({f"synthesize-{n}": f"ans {n}" for n in range(1, 5)})
        gw = scripted_gateway(write_fixtures(tmp_path / "fx", files))
        items = [QaItem("Q1?"), QaItem("Q2?")]
        answers = run_qa_suite(items, ["graph", "text"], graph, gw, POLICY,
                               run_dir=tmp_path / "run")
        assert len(answers) == 4
        assert [a.answer_id for a in answers] == \
            ["q000-graph", "q000-text", "q001-graph", "q001-text"]
        lines = (tmp_path / "run" / "answers.jsonl").read_text().splitlines()
        assert len(lines) == 4
        assert json.loads(lines[0])["answer_id"] == "q000-graph"

    def test_empty_items_empty_suite(self, graph, tmp_path):
        gw = scripted_gateway(tmp_path)
        assert run_qa_suite([], ["graph"], graph, gw, POLICY) == []

    def test_failure_becomes_unable_answer(self, graph, tmp_path):
        gw = scripted_gateway(tmp_path / "empty")  # no fixtures: backend error
        answers = run_qa_suite([QaItem("Q?")], ["graph"], graph, gw, POLICY)
        assert len(answers) == 1
        assert answers[0].text.startswith("UNABLE TO ANSWER")


class TestBuildCostReport:
    def write_run(self, run_dir, records, manifest=None, coverage=None):
        run_dir.mkdir(parents=True, exist_ok=True)
        ledger = UsageLedger()
        for rec in records:
            ledger.append(rec)
        ledger.save(run_dir / "ledger.json")
        if manifest is not None:
            (run_dir / "manifest.json").write_text(json.dumps(manifest))
        if coverage is not None:
            (run_dir / "report.json").write_text(json.dumps({"coverage": coverage}))

    def test_exact_cost_from_prices(self, tmp_path):
        self.write_run(tmp_path / "run",
                       [UsageRecord("schema_init", 1, 1000, 500, 10, True)])
        report = build_cost_report(tmp_path / "run", 1e-6, 3e-6)
        assert report.total_cost_usd == 0.0025
        assert report.request_count == 1

    def test_zero_requests_zero_cost(self, tmp_path):
        self.write_run(tmp_path / "run", [],
                       manifest={"started_at": 0, "finished_at": 150})
        report = build_cost_report(tmp_path / "run", 1e-6, 3e-6)
        assert report.total_cost_usd == 0.0
        assert report.request_count == 0
        assert report.total_time_min == 2.5

    def test_missing_ledger_is_fatal(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            build_cost_report(tmp_path / "nope", 0.0, 0.0)

    def test_coverage_read_from_report(self, tmp_path):
        self.write_run(tmp_path / "run", [], coverage=0.988)
        assert build_cost_report(tmp_path / "run", 0, 0).coverage == 0.988

    def test_time_defaults_to_zero_without_manifest(self, tmp_path):
        self.write_run(tmp_path / "run", [])
        assert build_cost_report(tmp_path / "run", 0, 0).total_time_min == 0.0


class TestRenderComparison:
    def test_table_layout(self):
        reports = [
            CostReport("/runs/logs", 12.0, 0.1234, 9, 0.988),
            CostReport("/runs/configs", 3.5, 2.0, 11, 1.0),
        ]
        text = render_comparison(reports)
        lines = text.splitlines()
        assert lines[0].split(" | ")[0].strip() == "Run"
        assert "Time (min)" in lines[0] and "Cost (USD)" in lines[0]
        assert "Requests" in lines[0] and "Coverage" in lines[0]
        assert set(lines[1]) <= {"-", "+"}
        assert "logs" in lines[2] and "12.0" in lines[2] and "0.12" in lines[2]
        assert "configs" in lines[3] and "1.00" in lines[3]

    def test_missing_coverage_renders_dash(self):
        text = render_comparison([CostReport("/r/x", 0.0, 0.0, 0, None)])
        assert text.splitlines()[2].rstrip().endswith("-")

    def test_empty_report_list(self):
        text = render_comparison([])
        assert "Run" in text.splitlines()[0]

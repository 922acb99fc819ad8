"""End-to-end extraction, coverage metric, report totals, and the sample sweep."""

import csv
import json

import pytest

from fastrag.config import Config
from fastrag.extraction import (EntityRecord, SweepConfig, build_report,
                                compute_coverage, run_extraction, sweep_sample_size)
from fastrag.gateway import UsageLedger, UsageRecord

from .conftest import (MINI_LINES, make_corpus, mini_corpus, mini_fixture_files,
                       scripted_gateway, write_fixtures)


def entity(etype, lines, props=None):
    return EntityRecord(etype, props or {}, lines)


def mini_config(fixtures_dir):
    return Config(overrides={"gateway.fixtures_dir": str(fixtures_dir)})


class TestRunExtraction:
    def test_mini_corpus_end_to_end(self, mini_fixture_dir, tmp_path):
        run_dir = tmp_path / "run"
        gw = scripted_gateway(mini_fixture_dir)
        report = run_extraction(mini_corpus(), mini_config(mini_fixture_dir),
                                run_dir, gw)
        assert report.coverage == 1.0
        assert report.entity_counts == {"Fruit": 3, "Veg": 3}
        assert report.failed_sections == []
        # artifacts persisted
        for name in ["schema.json", "step1.json", "step2.json",
                     "entities.jsonl", "report.json", "ledger.json"]:
            assert (run_dir / name).exists()
        assert (run_dir / "scripts" / "step1_splitter.py").exists()
        entities = [EntityRecord.from_json(json.loads(line))
                    for line in (run_dir / "entities.jsonl").read_text().splitlines()]
        assert {l for e in entities for l in e.input_data} == set(MINI_LINES)

    def test_report_totals_match_ledger(self, mini_fixture_dir, tmp_path):
        gw = scripted_gateway(mini_fixture_dir)
        report = run_extraction(mini_corpus(), mini_config(mini_fixture_dir),
                                tmp_path / "run", gw)
        totals = gw.ledger.totals()
        assert report.total_requests == totals["requests"]
        assert report.total_in_chars == totals["input_chars"]
        assert report.total_out_chars == totals["output_chars"]
        assert report.total_time_s == totals["latency_ms"] / 1000.0

    def test_empty_corpus_rejected(self, mini_fixture_dir, tmp_path):
        gw = scripted_gateway(mini_fixture_dir)
        with pytest.raises(ValueError, match="empty corpus"):
            run_extraction(make_corpus(("d", [])), mini_config(mini_fixture_dir),
                           tmp_path / "run", gw)

    def test_two_runs_write_identical_artifacts(self, tmp_path):
        outputs = []
        for i in range(2):
            fixtures = write_fixtures(tmp_path / f"fx{i}", mini_fixture_files())
            run_dir = tmp_path / f"run{i}"
            run_extraction(mini_corpus(), mini_config(fixtures), run_dir,
                           scripted_gateway(fixtures))
            outputs.append({p.name: p.read_bytes()
                            for p in run_dir.iterdir() if p.is_file()})
        assert outputs[0] == outputs[1]


class TestComputeCoverage:
    def test_full_coverage(self):
        corpus = make_corpus(("d", ["a", "b"]))
        assert compute_coverage(corpus, [entity("T", ["a", "b"])]) == 1.0

    def test_no_entities(self):
        corpus = make_corpus(("d", ["a", "b"]))
        assert compute_coverage(corpus, []) == 0.0

    def test_fractional(self):
        corpus = make_corpus(("d", [f"line {i}" for i in range(100)]))
        ents = [entity("T", [f"line {i}" for i in range(98)])]
        assert compute_coverage(corpus, ents) == 0.98

    def test_blank_lines_excluded_from_denominator(self):
        corpus = make_corpus(("d", ["a", "", "   ", "b"]))
        assert compute_coverage(corpus, [entity("T", ["a", "b"])]) == 1.0

    def test_whitespace_trimmed_before_matching(self):
        corpus = make_corpus(("d", ["  indented line  "]))
        assert compute_coverage(corpus, [entity("T", ["indented line"])]) == 1.0

    def test_monotone_in_entities(self):
        corpus = make_corpus(("d", [f"l{i}" for i in range(10)]))
        ents = []
        prev = 0.0
        for i in range(10):
            ents.append(entity("T", [f"l{i}"]))
            cov = compute_coverage(corpus, ents)
            assert cov >= prev
            prev = cov
        assert prev == 1.0


class TestBuildReport:
    def test_counts_and_totals(self):
        corpus = make_corpus(("d", ["a", "b", "c"]))
        ents = [entity("X", ["a"]), entity("X", ["b"]), entity("Y", ["c"])]
        ledger = UsageLedger()
        ledger.append(UsageRecord("schema_init", 1, 100, 40, 25, True))
        ledger.append(UsageRecord("script_init", 1, 60, 10, 22, True))
        report = build_report(corpus, ents, ledger, ["Z"])
        assert report.entity_counts == {"X": 2, "Y": 1}
        assert report.coverage == 1.0
        assert report.total_requests == 2
        assert report.total_in_chars == 160
        assert report.total_out_chars == 50
        assert report.total_time_s == 0.047
        assert report.failed_sections == ["Z"]
        assert report.to_json()["entity_counts"] == {"X": 2, "Y": 1}


class TestSweep:
    def test_grid_must_cover_every_sample_count(self):
        with pytest.raises(ValueError, match="missing"):
            SweepConfig(max_samples=3, grid={1: (1, 1), 3: (2, 2)})

    def test_single_point_sweep(self, mini_fixture_dir, tmp_path):
        sweep = SweepConfig(max_samples=1, grid={1: (2, 4)})
        rows = sweep_sample_size(
            mini_corpus(), sweep, mini_config(mini_fixture_dir),
            run_dir=tmp_path / "sweep",
            gateway_factory=lambda: scripted_gateway(mini_fixture_dir))
        assert len(rows) == 1
        row = rows[0]
        assert row["samples"] == 1 and row["actual_samples"] == 1
        assert row["identified_types"] == 2
        assert row["extracted_types"] == 2
        assert row["coverage"] == 1.0
        assert row["error"] == ""
        with (tmp_path / "sweep" / "sweep.csv").open() as fh:
            parsed = list(csv.DictReader(fh))
        assert len(parsed) == 1 and parsed[0]["samples"] == "1"

    def test_sweep_is_reproducible(self, tmp_path):
        sweep = SweepConfig(max_samples=1, grid={1: (2, 4)})
        csvs = []
        for i in range(2):
            fixtures = write_fixtures(tmp_path / f"fx{i}", mini_fixture_files())
            out = tmp_path / f"sweep{i}"
            sweep_sample_size(mini_corpus(), sweep, mini_config(fixtures),
                              run_dir=out,
                              gateway_factory=lambda: scripted_gateway(fixtures))
            csvs.append((out / "sweep.csv").read_bytes())
        assert csvs[0] == csvs[1]

    def test_per_point_chars_match_fresh_ledgers(self, mini_fixture_dir):
        gateways = []

        def factory():
            gw = scripted_gateway(mini_fixture_dir)
            gateways.append(gw)
            return gw

        sweep = SweepConfig(max_samples=1, grid={1: (2, 4)})
        rows = sweep_sample_size(mini_corpus(), sweep,
                                 mini_config(mini_fixture_dir),
                                 gateway_factory=factory)
        assert len(gateways) == 1
        totals = gateways[0].ledger.totals()
        assert rows[0]["in_chars"] == totals["input_chars"]
        assert rows[0]["out_chars"] == totals["output_chars"]
        assert rows[0]["latency_ms"] == totals["latency_ms"]

    def test_failing_point_recorded_as_row_error(self, tmp_path):
        fixtures = write_fixtures(tmp_path / "fx", {})  # no fixtures at all
        sweep = SweepConfig(max_samples=1, grid={1: (2, 4)})
        rows = sweep_sample_size(mini_corpus(), sweep, mini_config(fixtures),
                                 gateway_factory=lambda: scripted_gateway(fixtures))
        assert len(rows) == 1
        assert rows[0]["error"] != ""
        assert rows[0]["identified_types"] == 0

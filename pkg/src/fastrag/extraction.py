"""Two-step extraction orchestration, coverage metric, and sample-size sweep."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .config import Config
from .gateway import LlmGateway, RetryPolicy, StageExhausted, UsageLedger, make_backend
from .ingest import Chunk, Line, SourceCorpus, chunk_corpus
from .sampling import (KeywordExtractionConfig, SampleSelection, SampleSelectionConfig,
                       build_frequency_matrix, extract_keywords, preprocess_lines,
                       select_samples)
from .schema_learning import (SchemaDoc, SectionSchemaMap, Step1Schema, derive_step1,
                              derive_step2, learn_schema)
from .script_learning import (UNASSIGNED, ParserScript, SandboxConfig, execute_script,
                              learn_parser, validate_parser_output)

log = logging.getLogger(__name__)


@dataclass
class EntityRecord:
    entity_type: str
    properties: dict
    input_data: list[str]

    def to_json(self) -> dict:
        return {"entity_type": self.entity_type, "properties": self.properties,
                "input_data": self.input_data}

    @classmethod
    def from_json(cls, data: dict) -> "EntityRecord":
        return cls(data["entity_type"], data["properties"], data["input_data"])


@dataclass
class Section:
    name: str
    lines: list[Line]
    chunks: list[Chunk] = field(default_factory=list)
    samples: list[int] = field(default_factory=list)

    @property
    def text(self) -> str:
        return "\n".join(ln.text for ln in self.lines)


@dataclass
class ExtractionReport:
    coverage: float
    entity_counts: dict[str, int]
    total_requests: int
    total_in_chars: int
    total_out_chars: int
    total_time_s: float
    failed_sections: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "coverage": self.coverage,
            "entity_counts": dict(sorted(self.entity_counts.items())),
            "total_requests": self.total_requests,
            "total_in_chars": self.total_in_chars,
            "total_out_chars": self.total_out_chars,
            "total_time_s": self.total_time_s,
            "failed_sections": sorted(self.failed_sections),
        }


def _sandbox_from_config(config: Config) -> SandboxConfig:
    return SandboxConfig(
        interpreter_command=list(config.get("sandbox.interpreter_command")),
        time_limit_ms=config.get("sandbox.time_limit_ms"),
        max_output_bytes=config.get("sandbox.max_output_bytes"),
    )


def sample_corpus(corpus: SourceCorpus, chunks: list[Chunk],
                  kw_config: KeywordExtractionConfig,
                  sel_config: SampleSelectionConfig) -> tuple[set[str], SampleSelection]:
    token_lines = preprocess_lines(corpus)
    nonempty = [t for t in token_lines if t]
    if not nonempty:
        raise ValueError("empty corpus")
    matrix = build_frequency_matrix(token_lines)
    keywords = extract_keywords(matrix, kw_config)
    return keywords, select_samples(chunks, keywords, sel_config)


def run_step1(corpus: SourceCorpus, config: Config, gateway: LlmGateway,
              run_dir: Path | None = None
              ) -> tuple[SchemaDoc, Step1Schema, SectionSchemaMap, ParserScript,
                         list[Section]]:
    """Chunk, sample, learn schema + splitter, and split the full corpus."""
    if not corpus.all_lines():
        raise ValueError("empty corpus")
    chunks = chunk_corpus(corpus, config.get("ingest.chunk_tokens"),
                          config.get("ingest.overlap_tokens"))
    kw_config = KeywordExtractionConfig(
        n_clusters=config.get("sampling.n_clusters"),
        n_terms_per_cluster=config.get("sampling.n_terms_per_cluster"),
        random_seed=config.get("sampling.random_seed"))
    sel_config = SampleSelectionConfig(config.get("sampling.coverage_threshold"))
    _, selection = sample_corpus(corpus, chunks, kw_config, sel_config)
    samples = [chunks[cid] for cid in selection.selected_chunk_ids]

    policy = RetryPolicy(config.get("gateway.max_attempts"))
    sandbox = _sandbox_from_config(config)
    schema = learn_schema(samples, gateway, policy,
                          config.get("schema.max_depth"),
                          config.get("schema.max_properties"))
    step1 = derive_step1(schema)
    step2 = derive_step2(schema)
    splitter = learn_parser(samples, step1, "section_splitter", gateway, policy, sandbox)

    sections = split_corpus(corpus, step1, splitter, sandbox)

    if run_dir is not None:
        run_dir.mkdir(parents=True, exist_ok=True)
        _write_json(run_dir / "schema.json", schema.json_schema)
        _write_json(run_dir / "step1.json", step1.to_json_schema())
        _write_json(run_dir / "step2.json", step2)
        scripts_dir = run_dir / "scripts"
        scripts_dir.mkdir(exist_ok=True)
        ext = sandbox.script_extension
        (scripts_dir / f"step1_splitter.{ext}").write_text(
            splitter.source_code, encoding="utf-8")
    return schema, step1, step2, splitter, sections


def split_corpus(corpus: SourceCorpus, step1: Step1Schema, splitter: ParserScript,
                 sandbox: SandboxConfig) -> list[Section]:
    """Execute the splitter per document; every line lands in exactly one section."""
    by_name: dict[str, list[Line]] = {name: [] for name in step1.section_names}
    by_name[UNASSIGNED] = []
    for doc_id, lines in corpus.documents:
        if not lines:
            continue
        text = "\n".join(ln.text for ln in lines)
        result = execute_script(splitter.source_code, text, sandbox)
        if result.timed_out or result.exit_status != 0:
            raise RuntimeError(
                f"splitter failed on {doc_id}: {result.stderr[:500]}")
        error = validate_parser_output(result.stdout, step1, len(lines))
        if error:
            raise RuntimeError(f"splitter output invalid on {doc_id}: {error}")
        mapping = json.loads(result.stdout)
        for ln in lines:
            by_name[mapping[str(ln.number)]].append(ln)
    return [Section(name, lines) for name, lines in by_name.items()]


def run_step2(sections: list[Section], schema_map: SectionSchemaMap, config: Config,
              gateway: LlmGateway, run_dir: Path | None = None
              ) -> tuple[list[EntityRecord], list[str]]:
    """Learn one parser per non-empty section and run it over the whole section.

    Parser learning is sequential in section-name order so scripted fixture
    replay stays deterministic; execution over the sections uses a worker pool.
    Returns (entities, failed section names).
    """
    policy = RetryPolicy(config.get("gateway.max_attempts"))
    sandbox = _sandbox_from_config(config)
    kw_config = KeywordExtractionConfig(
        n_clusters=config.get("extraction.step2_n_clusters"),
        n_terms_per_cluster=config.get("extraction.step2_n_terms_per_cluster"),
        random_seed=config.get("sampling.random_seed"))
    sel_config = SampleSelectionConfig(config.get("sampling.coverage_threshold"))
    step2_tokens = config.get("extraction.step2_chunk_tokens")

    active = sorted((s for s in sections if s.lines and s.name != UNASSIGNED),
                    key=lambda s: s.name)
    for s in sections:
        if not s.lines and s.name != UNASSIGNED:
            log.info("section %s is empty; skipped", s.name)

    parsers: dict[str, ParserScript] = {}
    failed: list[str] = []
    for section in active:
        # renumber so the mini corpus keeps gap-free 1-based line numbers
        renumbered = [Line(f"section:{section.name}", i + 1, ln.text)
                      for i, ln in enumerate(section.lines)]
        mini = SourceCorpus(documents=[(f"section:{section.name}", renumbered)])
        section.chunks = chunk_corpus(mini, step2_tokens, 0)
        _, selection = sample_corpus(mini, section.chunks, kw_config, sel_config)
        section.samples = selection.selected_chunk_ids
        samples = [section.chunks[cid] for cid in selection.selected_chunk_ids]
        if not samples:  # no keywords survived; fall back to the first chunk
            samples = section.chunks[:1]
        try:
            parsers[section.name] = learn_parser(
                samples, schema_map[section.name], "section_parser",
                gateway, policy, sandbox, section=section.name)
        except StageExhausted as exc:
            log.error("section %s parser learning failed: %s", section.name, exc)
            failed.append(section.name)

    def run_one(section: Section) -> list[EntityRecord]:
        parser = parsers[section.name]
        result = execute_script(parser.source_code, section.text, sandbox)
        if result.timed_out or result.exit_status != 0:
            raise RuntimeError(result.stderr[:500])
        error = validate_parser_output(result.stdout, schema_map[section.name])
        if error:
            raise RuntimeError(error)
        records = []
        for obj in json.loads(result.stdout):
            raw = obj.pop("input_data", "")
            input_lines = [l for l in raw.split("\n") if l.strip()]
            records.append(EntityRecord(section.name, obj, input_lines))
        return records

    runnable = [s for s in active if s.name in parsers]
    entities: list[EntityRecord] = []
    with ThreadPoolExecutor(max_workers=config.get("extraction.workers")) as pool:
        futures = {s.name: pool.submit(run_one, s) for s in runnable}
        for section in runnable:  # merge in section-name order
            try:
                entities.extend(futures[section.name].result())
            except Exception as exc:  # noqa: BLE001 - one section must not sink the rest
                log.error("section %s execution failed: %s", section.name, exc)
                failed.append(section.name)

    if run_dir is not None:
        scripts_dir = run_dir / "scripts"
        scripts_dir.mkdir(parents=True, exist_ok=True)
        sandbox_ext = sandbox.script_extension
        for name, parser in sorted(parsers.items()):
            (scripts_dir / f"step2_{name}.{sandbox_ext}").write_text(
                parser.source_code, encoding="utf-8")
        with (run_dir / "entities.jsonl").open("w", encoding="utf-8") as fh:
            for record in entities:
                fh.write(json.dumps(record.to_json(), sort_keys=True) + "\n")
    return entities, sorted(failed)


def compute_coverage(corpus: SourceCorpus, entities: list[EntityRecord]) -> float:
    """Fraction of non-blank corpus lines whose trimmed text appears in any
    entity's input_data."""
    covered_texts = {line.strip() for e in entities for line in e.input_data}
    covered_texts.discard("")
    denom = 0
    covered = 0
    for ln in corpus.all_lines():
        text = ln.text.strip()
        if not text:
            continue
        denom += 1
        if text in covered_texts:
            covered += 1
    return covered / denom if denom else 1.0


def build_report(corpus: SourceCorpus, entities: list[EntityRecord],
                 ledger: UsageLedger, failed_sections: list[str]) -> ExtractionReport:
    counts: dict[str, int] = {}
    for e in entities:
        counts[e.entity_type] = counts.get(e.entity_type, 0) + 1
    totals = ledger.totals()
    return ExtractionReport(
        coverage=compute_coverage(corpus, entities),
        entity_counts=counts,
        total_requests=totals["requests"],
        total_in_chars=totals["input_chars"],
        total_out_chars=totals["output_chars"],
        total_time_s=totals["latency_ms"] / 1000.0,
        failed_sections=failed_sections,
    )


def run_extraction(corpus: SourceCorpus, config: Config, run_dir: Path,
                   gateway: LlmGateway | None = None) -> ExtractionReport:
    """Full Step 1 + Step 2 pipeline with persisted artifacts."""
    if gateway is None:
        gateway = LlmGateway(make_backend(config))
    run_dir.mkdir(parents=True, exist_ok=True)
    try:
        _, step1, step2, _, sections = run_step1(corpus, config, gateway, run_dir)
        entities, failed = run_step2(sections, step2, config, gateway, run_dir)
    except StageExhausted:
        gateway.ledger.save(run_dir / "ledger.json")
        raise
    report = build_report(corpus, entities, gateway.ledger, failed)
    _write_json(run_dir / "report.json", report.to_json())
    gateway.ledger.save(run_dir / "ledger.json")
    return report


@dataclass
class SweepConfig:
    max_samples: int
    grid: dict[int, tuple[int, int]]  # target sample count -> (n_clusters, n_terms)

    def __post_init__(self):
        missing = [k for k in range(1, self.max_samples + 1) if k not in self.grid]
        if missing:
            raise ValueError(f"sweep grid missing sample counts: {missing}")


def sweep_sample_size(corpus: SourceCorpus, sweep: SweepConfig, config: Config,
                      run_dir: Path | None = None,
                      gateway_factory=None) -> list[dict]:
    """Run Step-1 learning per target sample count; one fresh gateway per point."""
    if gateway_factory is None:
        gateway_factory = lambda: LlmGateway(make_backend(config))  # noqa: E731
    chunks = chunk_corpus(corpus, config.get("ingest.chunk_tokens"),
                          config.get("ingest.overlap_tokens"))
    sel_config = SampleSelectionConfig(config.get("sampling.coverage_threshold"))
    policy = RetryPolicy(config.get("gateway.max_attempts"))
    sandbox = _sandbox_from_config(config)
    rows: list[dict] = []
    for target in range(1, sweep.max_samples + 1):
        n_c, n_t = sweep.grid[target]
        kw_config = KeywordExtractionConfig(
            n_clusters=n_c, n_terms_per_cluster=n_t,
            random_seed=config.get("sampling.random_seed"))
        gateway = gateway_factory()
        row = {"samples": target, "actual_samples": 0, "identified_types": 0,
               "extracted_types": 0, "coverage": 0.0, "in_chars": 0,
               "out_chars": 0, "latency_ms": 0, "error": ""}
        try:
            _, selection = sample_corpus(corpus, chunks, kw_config, sel_config)
            sample_ids = selection.selected_chunk_ids[:target]
            samples = [chunks[cid] for cid in sample_ids] or chunks[:1]
            row["actual_samples"] = len(samples)
            schema = learn_schema(samples, gateway, policy,
                                  config.get("schema.max_depth"),
                                  config.get("schema.max_properties"))
            step1 = derive_step1(schema)
            splitter = learn_parser(samples, step1, "section_splitter",
                                    gateway, policy, sandbox)
            sections = split_corpus(corpus, step1, splitter, sandbox)
            assigned = sum(len(s.lines) for s in sections if s.name != UNASSIGNED)
            total = len([ln for ln in corpus.all_lines() if ln.text.strip()])
            row["identified_types"] = len(schema.entity_types)
            row["extracted_types"] = sum(
                1 for s in sections if s.name != UNASSIGNED and s.lines)
            row["coverage"] = assigned / total if total else 1.0
        except (StageExhausted, RuntimeError, ValueError) as exc:
            row["error"] = str(exc)
        totals = gateway.ledger.totals()
        row["in_chars"] = totals["input_chars"]
        row["out_chars"] = totals["output_chars"]
        row["latency_ms"] = totals["latency_ms"]
        rows.append(row)
    if run_dir is not None:
        run_dir.mkdir(parents=True, exist_ok=True)
        write_sweep_csv(run_dir / "sweep.csv", rows)
    return rows


SWEEP_COLUMNS = ["samples", "actual_samples", "identified_types", "extracted_types",
                 "coverage", "in_chars", "out_chars", "latency_ms", "error"]


def write_sweep_csv(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")

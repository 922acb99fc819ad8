"""fastrag command line: ingest, sample, sweep, extract, build-kg, query, repl, eval, report."""

from __future__ import annotations

import json
import logging
import sys
import time
from pathlib import Path

import click

from . import evalharness, extraction, kg, retrieval
from .config import Config, ConfigError
from .gateway import (BackendConfigError, LlmGateway, RetryPolicy, StageExhausted,
                      make_backend)
from .ingest import Line, SourceCorpus, chunk_corpus, load_corpus
from .sampling import KeywordExtractionConfig, SampleSelectionConfig

log = logging.getLogger(__name__)

STAGE_ORDER = ["ingest", "sample", "step1", "step2", "kg"]


class StageOrderError(RuntimeError):
    """A subcommand ran before its prerequisite pipeline stage."""


def _manifest_path(run_dir: Path) -> Path:
    return run_dir / "manifest.json"


def _load_manifest(run_dir: Path) -> dict:
    path = _manifest_path(run_dir)
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    return {"run_id": run_dir.name, "stages": {}, "config": {},
            "started_at": None, "finished_at": None}


def _save_manifest(run_dir: Path, manifest: dict) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    _manifest_path(run_dir).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _require_stage(manifest: dict, stage: str, message: str) -> None:
    if not manifest["stages"].get(stage):
        raise StageOrderError(message)


def _save_corpus(run_dir: Path, corpus: SourceCorpus) -> None:
    data = [{"doc_id": doc_id, "lines": [ln.text for ln in lines]}
            for doc_id, lines in corpus.documents]
    (run_dir / "corpus.json").write_text(
        json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _load_saved_corpus(run_dir: Path) -> SourceCorpus:
    path = run_dir / "corpus.json"
    if not path.exists():
        raise StageOrderError("corpus not ingested: run `fastrag ingest` first")
    data = json.loads(path.read_text(encoding="utf-8"))
    return SourceCorpus(documents=[
        (doc["doc_id"], [Line(doc["doc_id"], i + 1, t)
                         for i, t in enumerate(doc["lines"])])
        for doc in data])


def _common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(), default=None,
                      help="JSON config file (flat, dotted keys).")(fn)
    fn = click.option("--run-dir", "run_dir", type=click.Path(), required=True,
                      help="Run directory for artifacts.")(fn)
    fn = click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
                      help="Config override, highest precedence; repeatable.")(fn)
    fn = click.option("--force", is_flag=True, help="Re-run a completed stage.")(fn)
    return fn


def _build_config(config_path, overrides) -> Config:
    parsed: dict = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"bad --set override (need KEY=VALUE): {item}")
        key, raw = item.split("=", 1)
        try:
            parsed[key] = json.loads(raw)
        except json.JSONDecodeError:
            parsed[key] = raw
    return Config.load(config_path, parsed)


@click.group()
def cli():
    """FastRAG: structure semi-structured text and answer questions over it."""


@cli.command()
@_common_options
@click.argument("paths", nargs=-1, required=True, type=click.Path())
def ingest(config_path, run_dir, overrides, force, paths):
    """Load source files into the run directory."""
    run_dir = Path(run_dir)
    config = _build_config(config_path, overrides)
    manifest = _load_manifest(run_dir)
    if manifest["stages"].get("ingest") and not force:
        click.echo("ingest already complete (use --force to redo)")
        return
    corpus = load_corpus(list(paths))
    run_dir.mkdir(parents=True, exist_ok=True)
    _save_corpus(run_dir, corpus)
    manifest["stages"]["ingest"] = True
    manifest["config"] = config.snapshot()
    manifest["started_at"] = manifest.get("started_at") or time.time()
    _save_manifest(run_dir, manifest)
    n_lines = len(corpus.all_lines())
    click.echo(json.dumps({"documents": len(corpus.documents), "lines": n_lines}))


@cli.command()
@_common_options
def sample(config_path, run_dir, overrides, force):
    """Select representative sample chunks and print the selection as JSON."""
    run_dir = Path(run_dir)
    config = _build_config(config_path, overrides)
    manifest = _load_manifest(run_dir)
    _require_stage(manifest, "ingest", "corpus not ingested: run `fastrag ingest` first")
    corpus = _load_saved_corpus(run_dir)
    chunks = chunk_corpus(corpus, config.get("ingest.chunk_tokens"),
                          config.get("ingest.overlap_tokens"))
    kw_config = KeywordExtractionConfig(
        n_clusters=config.get("sampling.n_clusters"),
        n_terms_per_cluster=config.get("sampling.n_terms_per_cluster"),
        random_seed=config.get("sampling.random_seed"))
    sel_config = SampleSelectionConfig(config.get("sampling.coverage_threshold"))
    _, selection = extraction.sample_corpus(corpus, chunks, kw_config, sel_config)
    manifest["stages"]["sample"] = True
    _save_manifest(run_dir, manifest)
    click.echo(json.dumps({
        "selected_chunk_ids": selection.selected_chunk_ids,
        "achieved_coverage": selection.achieved_coverage,
        "per_step_gains": selection.per_step_gains,
    }))


@cli.command()
@_common_options
@click.option("--max-samples", type=int, default=4, show_default=True)
@click.option("--grid", "grid_json", default=None,
              help='JSON map of sample count -> [n_clusters, n_terms].')
def sweep(config_path, run_dir, overrides, force, max_samples, grid_json):
    """Sample-size sweep over Step-1 learning; writes sweep.csv."""
    run_dir = Path(run_dir)
    config = _build_config(config_path, overrides)
    manifest = _load_manifest(run_dir)
    _require_stage(manifest, "ingest", "corpus not ingested: run `fastrag ingest` first")
    corpus = _load_saved_corpus(run_dir)
    if grid_json:
        raw = json.loads(grid_json)
        grid = {int(k): (int(v[0]), int(v[1])) for k, v in raw.items()}
    else:
        base_t = config.get("sampling.n_terms_per_cluster")
        grid = {k: (max(1, 2 * k), base_t) for k in range(1, max_samples + 1)}
    rows = extraction.sweep_sample_size(
        corpus, extraction.SweepConfig(max_samples, grid), config, run_dir)
    _save_manifest(run_dir, manifest)
    click.echo(json.dumps(rows))


@cli.command()
@_common_options
def extract(config_path, run_dir, overrides, force):
    """Run Step 1 + Step 2 extraction and write run artifacts."""
    run_dir = Path(run_dir)
    config = _build_config(config_path, overrides)
    manifest = _load_manifest(run_dir)
    _require_stage(manifest, "ingest", "corpus not ingested: run `fastrag ingest` first")
    if manifest["stages"].get("step2") and not force:
        click.echo("extract already complete (use --force to redo)")
        return
    corpus = _load_saved_corpus(run_dir)
    manifest["started_at"] = manifest.get("started_at") or time.time()
    try:
        report = extraction.run_extraction(corpus, config, run_dir)
    except StageExhausted:
        manifest["stages"]["step1"] = False
        manifest["stages"]["step2"] = False
        _save_manifest(run_dir, manifest)
        raise
    manifest["stages"]["sample"] = True
    manifest["stages"]["step1"] = True
    manifest["stages"]["step2"] = True
    manifest["finished_at"] = time.time()
    manifest["config"] = config.snapshot()
    _save_manifest(run_dir, manifest)
    click.echo(json.dumps(report.to_json()))


@cli.command("build-kg")
@_common_options
def build_kg(config_path, run_dir, overrides, force):
    """Build graph.json from entities.jsonl."""
    run_dir = Path(run_dir)
    _build_config(config_path, overrides)
    manifest = _load_manifest(run_dir)
    _require_stage(manifest, "step2", "entities not extracted: run `fastrag extract` first")
    if manifest["stages"].get("kg") and not force:
        click.echo("build-kg already complete (use --force to redo)")
        return
    entities_path = run_dir / "entities.jsonl"
    entities = [extraction.EntityRecord.from_json(json.loads(line))
                for line in entities_path.read_text(encoding="utf-8").splitlines()
                if line.strip()]
    graph = kg.build_graph(entities)
    graph.save(run_dir / "graph.json")
    manifest["stages"]["kg"] = True
    _save_manifest(run_dir, manifest)
    click.echo(json.dumps({"nodes": len(graph.nodes), "edges": len(graph.edges)}))


def _load_graph(run_dir: Path) -> kg.KnowledgeGraph:
    manifest = _load_manifest(run_dir)
    if not manifest["stages"].get("kg") or not (run_dir / "graph.json").exists():
        raise StageOrderError("graph not built: run `fastrag build-kg` first")
    return kg.KnowledgeGraph.load(run_dir / "graph.json")


@cli.command()
@_common_options
@click.option("--strategy", type=click.Choice([s.value for s in retrieval.RetrievalStrategy]),
              default="hybrid", show_default=True)
@click.argument("question")
def query(config_path, run_dir, overrides, force, strategy, question):
    """Answer one question; prints the answer as JSON."""
    run_dir = Path(run_dir)
    config = _build_config(config_path, overrides)
    graph = _load_graph(run_dir)
    gateway = LlmGateway(make_backend(config))
    ans = retrieval.answer(question, strategy, graph, gateway,
                           RetryPolicy(config.get("gateway.max_attempts")),
                           config.get("retrieval.table_byte_budget"),
                           config.get("retrieval.text_search_limit"))
    click.echo(json.dumps(ans.to_json(), sort_keys=True))


@cli.command()
@_common_options
def repl(config_path, run_dir, overrides, force):
    """Interactive Q&A with per-answer grading."""
    run_dir = Path(run_dir)
    config = _build_config(config_path, overrides)
    graph = _load_graph(run_dir)
    gateway = LlmGateway(make_backend(config))
    policy = RetryPolicy(config.get("gateway.max_attempts"))
    click.echo("fastrag repl: empty line quits; strategy prefix like `graph:` optional")
    idx = 0
    answers = []
    while True:
        try:
            line = input("? ").strip()
        except EOFError:
            break
        if not line:
            break
        strategy = "hybrid"
        if ":" in line and line.split(":", 1)[0] in [s.value for s in retrieval.RetrievalStrategy]:
            strategy, line = line.split(":", 1)
            line = line.strip()
        ans = retrieval.answer(line, strategy, graph, gateway, policy,
                               config.get("retrieval.table_byte_budget"),
                               config.get("retrieval.text_search_limit"))
        ans.answer_id = f"repl{idx:03d}-{strategy}"
        idx += 1
        answers.append(ans)
        with (run_dir / "answers.jsonl").open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(ans.to_json(), sort_keys=True) + "\n")
        click.echo(ans.text)
        grade = input("grade [-/+/++ or enter to skip] ").strip()
        mapping = {"-": "incorrect", "+": "correct", "++": "correct_plus"}
        if grade in mapping:
            retrieval.grade_label(run_dir, ans.answer_id, mapping[grade])


@cli.command("eval")
@_common_options
@click.option("--qa", "qa_path", type=click.Path(), required=True,
              help="JSON array of {question, reference_answer, source}.")
@click.option("--strategies", default="all", show_default=True,
              help='Comma-separated strategies, or "all".')
def eval_cmd(config_path, run_dir, overrides, force, qa_path, strategies):
    """Run a Q&A suite over the built graph."""
    run_dir = Path(run_dir)
    config = _build_config(config_path, overrides)
    graph = _load_graph(run_dir)
    if strategies == "all":
        strats = [s.value for s in retrieval.RetrievalStrategy]
    else:
        strats = [s.strip() for s in strategies.split(",") if s.strip()]
    items = evalharness.load_qa_items(qa_path)
    gateway = LlmGateway(make_backend(config))
    answers = evalharness.run_qa_suite(
        items, strats, graph, gateway,
        RetryPolicy(config.get("gateway.max_attempts")), run_dir,
        config.get("retrieval.table_byte_budget"))
    click.echo(json.dumps({"items": len(items), "strategies": strats,
                           "answers": len(answers)}))


@cli.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE")
@click.option("--runs", "runs", multiple=True, required=True, type=click.Path())
def report(config_path, overrides, runs):
    """Cost/time report for one or more completed runs."""
    config = _build_config(config_path, overrides)
    reports = [evalharness.build_cost_report(
        run, config.get("gateway.in_price_per_char"),
        config.get("gateway.out_price_per_char")) for run in runs]
    for rep in reports:
        out = Path(rep.run_dir) / "cost_report.json"
        out.write_text(json.dumps(rep.to_json(), indent=2, sort_keys=True) + "\n",
                       encoding="utf-8")
    click.echo(evalharness.render_comparison(reports))


def dispatch(argv: list[str]) -> int:
    """Run the CLI: exit 0 on success, 1 on user error, 2 on pipeline failure."""
    try:
        cli.main(args=list(argv), prog_name="fastrag", standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        return 1
    except click.exceptions.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except (StageOrderError, StageExhausted, BackendConfigError, RuntimeError) as exc:
        click.echo(f"pipeline error: {exc}", err=True)
        return 2


def main() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

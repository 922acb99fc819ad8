"""Shared test fixtures: bundled corpora runs and a tiny synthetic fixture set."""

import json
from pathlib import Path

import pytest

from fastrag.config import Config
from fastrag.extraction import run_extraction
from fastrag.gateway import LlmGateway, ScriptedBackend
from fastrag.ingest import Line, SourceCorpus, load_corpus
from fastrag.kg import KnowledgeGraph, build_graph

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"


def make_corpus(*docs):
    """docs: (doc_id, [line text, ...]) pairs."""
    return SourceCorpus(documents=[
        (doc_id, [Line(doc_id, i + 1, text) for i, text in enumerate(lines)])
        for doc_id, lines in docs])


def write_fixtures(fixtures_dir, files):
    fixtures_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (fixtures_dir / f"{name}.txt").write_text(text, encoding="utf-8")
    return fixtures_dir


def scripted_gateway(fixtures_dir):
    return LlmGateway(ScriptedBackend(fixtures_dir))


# ---------------------------------------------------------------------------
# A tiny two-section corpus with its own replay fixtures, for tests that need
# full pipeline runs without the bundled corpora.

MINI_LINES = [
    "fruit apple red",
    "fruit banana yellow",
    "veg carrot orange",
    "fruit cherry red",
    "veg daikon white",
    "veg endive green",
]

MINI_SCHEMA = {
    "type": "object",
    "properties": {
        "Fruit": {
            "type": "array",
            "description": "A fruit and its color.",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "color": {"type": "string"},
                    "input_data": {"type": "string"},
                },
                "required": ["name", "input_data"],
            },
        },
        "Veg": {
            "type": "array",
            "description": "A vegetable and its color.",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "color": {"type": "string"},
                    "input_data": {"type": "string"},
                },
                "required": ["name", "input_data"],
            },
        },
    },
}

MINI_SPLITTER = """\
import json, sys
lines = sys.stdin.read().split("\\n")
if lines and lines[-1] == "":
    lines.pop()
out = {}
for i, line in enumerate(lines, start=1):
    word = line.split()[0] if line.split() else ""
    out[str(i)] = {"fruit": "Fruit", "veg": "Veg"}.get(word, "_unassigned")
print(json.dumps(out))
"""

MINI_PARSER = """\
import json, sys
entries = []
for line in sys.stdin.read().split("\\n"):
    parts = line.split()
    if len(parts) >= 3:
        entries.append({"name": parts[1], "color": parts[2], "input_data": line})
print(json.dumps(entries))
"""


def mini_corpus():
    return make_corpus(("mini.txt", MINI_LINES))


def mini_fixture_files():
    schema_text = json.dumps(MINI_SCHEMA, indent=2)
    files = {"schema_init-1": schema_text, "script_init-1": MINI_SPLITTER,
             "script_init-2": MINI_PARSER, "script_init-3": MINI_PARSER}
    for n in range(1, 5):
        files[f"schema_refine-{n}"] = schema_text
        files[f"script_refine-{n}"] = MINI_SPLITTER
    return files


@pytest.fixture
def mini_fixture_dir(tmp_path):
    return write_fixtures(tmp_path / "mini-fixtures", mini_fixture_files())


# ---------------------------------------------------------------------------
# Session-scoped runs over the bundled corpora.


def _pipeline_run(tmp_path_factory, name, corpus_paths):
    run_dir = tmp_path_factory.mktemp(f"run-{name}")
    corpus = load_corpus(corpus_paths)
    config = Config(overrides={
        "gateway.fixtures_dir": str(FIXTURES / "prompts" / name)})
    gateway = scripted_gateway(FIXTURES / "prompts" / name)
    report = run_extraction(corpus, config, run_dir, gateway)
    entities_path = run_dir / "entities.jsonl"
    from fastrag.extraction import EntityRecord
    entities = [EntityRecord.from_json(json.loads(line))
                for line in entities_path.read_text().splitlines()]
    graph = build_graph(entities)
    graph.save(run_dir / "graph.json")
    return {"run_dir": run_dir, "corpus": corpus, "report": report,
            "entities": entities, "graph": graph}


@pytest.fixture(scope="session")
def configs_run(tmp_path_factory):
    paths = sorted((FIXTURES / "corpora" / "configs").glob("*.cfg"))
    return _pipeline_run(tmp_path_factory, "configs", paths)


@pytest.fixture(scope="session")
def logs_run(tmp_path_factory):
    return _pipeline_run(tmp_path_factory, "logs",
                         [FIXTURES / "corpora" / "logs" / "nova.log"])


@pytest.fixture(scope="session")
def configs_graph(configs_run) -> KnowledgeGraph:
    return configs_run["graph"]


@pytest.fixture(scope="session")
def logs_graph(logs_run) -> KnowledgeGraph:
    return logs_run["graph"]

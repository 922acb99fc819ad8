"""Question answering through the Graph, Text, Combined, and Hybrid strategies."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from . import prompts
from .gateway import LlmGateway, PromptRequest, PromptResponse, RetryPolicy, StageExhausted
from .kg import KnowledgeGraph, export_schema, text_search
from .miniquery import GRAMMAR_DOC, QueryParseError, ResultTable, parse_query, run_query
from .textsearch import TextQueryError, parse_text_query

log = logging.getLogger(__name__)

UNABLE_MARKER = "UNABLE TO ANSWER"
NO_RESULTS_MARKER = "[no results]"

TEXT_SEARCH_EXAMPLES = """\
Space-separated terms must all match (AND): error compute
OR between alternatives: nova-api OR nova-compute
Quoted phrase, contiguous match: "status 200"
Trailing * for prefix match: metad*
Trailing ~ for one-typo fuzzy match: statu~
"""


class RetrievalStrategy(str, Enum):
    GRAPH = "graph"
    TEXT = "text"
    COMBINED = "combined"
    HYBRID = "hybrid"


@dataclass
class Answer:
    text: str
    strategy: str
    generated_queries: list[str] = field(default_factory=list)
    raw_results: list[dict] = field(default_factory=list)
    ledger_slice: list[dict] = field(default_factory=list)
    answer_id: str | None = None

    def to_json(self) -> dict:
        return {
            "answer_id": self.answer_id,
            "strategy": self.strategy,
            "text": self.text,
            "generated_queries": self.generated_queries,
            "result_row_counts": [len(t["rows"]) for t in self.raw_results],
            "raw_results": self.raw_results,
            "ledger_slice": self.ledger_slice,
        }


def _truncate_table(table: dict, byte_budget: int) -> str:
    blob = json.dumps(table, sort_keys=True)
    if len(blob.encode("utf-8")) > byte_budget:
        blob = blob.encode("utf-8")[:byte_budget].decode("utf-8", errors="ignore")
    return blob


def _text_result_table(results) -> ResultTable:
    return ResultTable(
        columns=["line", "entity_label", "score"],
        rows=[[line.properties.get("text", ""), parent.label, round(score, 6)]
              for line, parent, score in results])


def _generate_and_run(question: str, stage: str, graph: KnowledgeGraph,
                      gateway: LlmGateway, policy: RetryPolicy,
                      text_limit: int) -> tuple[str, ResultTable]:
    """One generation prompt (with parse-repair retries) plus execution."""
    schema_text = export_schema(graph).to_text()
    if stage == "query_graph":
        user = prompts.render("query_graph", schema=schema_text,
                              grammar=GRAMMAR_DOC, question=question)
    elif stage == "query_text":
        user = prompts.render("query_text", examples=TEXT_SEARCH_EXAMPLES,
                              question=question)
    else:
        user = prompts.render("query_hybrid", schema=schema_text, grammar=GRAMMAR_DOC,
                              examples=TEXT_SEARCH_EXAMPLES, question=question)

    def validator(response: PromptResponse) -> str | None:
        query = response.text.strip()
        try:
            if stage == "query_text":
                parse_text_query(query)
            else:
                parse_query(query)
        except (QueryParseError, TextQueryError) as exc:
            return f"query does not parse: {exc}"
        return None

    response = gateway.complete_with_validation(
        PromptRequest(stage=stage, system_text=prompts.template("system"), user_text=user),
        validator, policy)
    query = response.text.strip()
    if stage == "query_text":
        table = _text_result_table(text_search(graph, query, limit=text_limit))
    else:
        table = run_query(graph, query)
    return query, table


def _synthesize(question: str, tables: list[ResultTable], gateway: LlmGateway,
                byte_budget: int) -> str:
    parts = [_truncate_table(t.to_json(), byte_budget) for t in tables]
    user = prompts.render("synthesize", question=question, results="\n\n".join(parts))
    response = gateway.complete(PromptRequest(
        stage="synthesize", system_text=prompts.template("system"), user_text=user))
    text = response.text.strip()
    if all(not t.rows for t in tables):
        text = f"{NO_RESULTS_MARKER} {text}"
    return text


def answer(question: str, strategy: RetrievalStrategy | str, graph: KnowledgeGraph,
           gateway: LlmGateway, policy: RetryPolicy,
           table_byte_budget: int = 16384, text_search_limit: int = 10) -> Answer:
    strategy = RetrievalStrategy(strategy)
    start = len(gateway.ledger.records)
    queries: list[str] = []
    tables: list[ResultTable] = []
    try:
        if strategy in (RetrievalStrategy.GRAPH, RetrievalStrategy.TEXT,
                        RetrievalStrategy.HYBRID):
            stage = {"graph": "query_graph", "text": "query_text",
                     "hybrid": "query_hybrid"}[strategy.value]
            query, table = _generate_and_run(question, stage, graph, gateway, policy,
                                             text_search_limit)
            queries.append(query)
            tables.append(table)
        else:  # combined: both branches concurrently, then one synthesis
            with ThreadPoolExecutor(max_workers=2) as pool:
                graph_future = pool.submit(_generate_and_run, question, "query_graph",
                                           graph, gateway, policy, text_search_limit)
                text_future = pool.submit(_generate_and_run, question, "query_text",
                                          graph, gateway, policy, text_search_limit)
                for future in (graph_future, text_future):
                    query, table = future.result()
                    queries.append(query)
                    tables.append(table)
        text = _synthesize(question, tables, gateway, table_byte_budget)
    except StageExhausted as exc:
        log.error("retrieval stage exhausted: %s", exc)
        text = f"{UNABLE_MARKER}: {exc.last_error}"
    # the combined strategy appends from two threads; order the slice
    # deterministically so persisted answers are byte-reproducible
    records = sorted(gateway.ledger.records[start:],
                     key=lambda r: (r.stage, r.attempt))
    return Answer(
        text=text, strategy=strategy.value, generated_queries=queries,
        raw_results=[t.to_json() for t in tables],
        ledger_slice=[r.__dict__ for r in records])


GRADE_LABELS = ("incorrect", "correct", "correct_plus")


def grade_label(run_dir: str | Path, answer_id: str, label: str) -> dict:
    """Record a human grade for a persisted answer; immutable once written."""
    if label not in GRADE_LABELS:
        raise ValueError(f"unknown grade label: {label}; expected one of {GRADE_LABELS}")
    run_dir = Path(run_dir)
    answers_path = run_dir / "answers.jsonl"
    if not answers_path.exists():
        raise FileNotFoundError(f"no answers recorded under {run_dir}")
    known = set()
    with answers_path.open(encoding="utf-8") as fh:
        for line in fh:
            known.add(json.loads(line)["answer_id"])
    if answer_id not in known:
        raise KeyError(f"unknown answer id: {answer_id}")
    grades_path = run_dir / "grades.json"
    grades = json.loads(grades_path.read_text(encoding="utf-8")) if grades_path.exists() else {}
    if answer_id in grades:
        raise ValueError(f"answer {answer_id} is already graded ({grades[answer_id]})")
    grades[answer_id] = label
    grades_path.write_text(json.dumps(grades, indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")
    return {answer_id: label}

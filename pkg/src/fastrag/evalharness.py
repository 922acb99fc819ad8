"""Q&A suite runner and cost/accounting reports."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .gateway import LlmGateway, RetryPolicy, UsageLedger
from .kg import KnowledgeGraph
from .retrieval import Answer, RetrievalStrategy, answer

log = logging.getLogger(__name__)


@dataclass
class QaItem:
    question: str
    reference_answer: str = ""
    source: str = ""


@dataclass
class CostReport:
    run_dir: str
    total_time_min: float
    total_cost_usd: float
    request_count: int
    coverage: float | None

    def to_json(self) -> dict:
        return {
            "run_dir": self.run_dir,
            "total_time_min": self.total_time_min,
            "total_cost_usd": self.total_cost_usd,
            "request_count": self.request_count,
            "coverage": self.coverage,
        }


def load_qa_items(path: str | Path) -> list[QaItem]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ValueError("QA file must hold a JSON array")
    items = []
    for i, raw in enumerate(data):
        question = (raw or {}).get("question", "")
        if not question:
            raise ValueError(f"QA item {i} has an empty question")
        items.append(QaItem(question, raw.get("reference_answer", ""),
                            raw.get("source", "")))
    return items


def run_qa_suite(items: list[QaItem], strategies: list[str], graph: KnowledgeGraph,
                 gateway: LlmGateway, policy: RetryPolicy,
                 run_dir: Path | None = None,
                 table_byte_budget: int = 16384) -> list[Answer]:
    """Produce one answer per (item, strategy); grades are entered later.

    Items run sequentially so scripted fixture replay stays deterministic;
    answers are persisted ordered by (item index, strategy order).
    """
    answers: list[Answer] = []
    for idx, item in enumerate(items):
        for strat in strategies:
            try:
                ans = answer(item.question, RetrievalStrategy(strat), graph,
                             gateway, policy, table_byte_budget)
            except Exception as exc:  # noqa: BLE001 - suite keeps going
                log.error("answer failed for item %d strategy %s: %s", idx, strat, exc)
                ans = Answer(text=f"UNABLE TO ANSWER: {exc}", strategy=strat)
            ans.answer_id = f"q{idx:03d}-{strat}"
            answers.append(ans)
    if run_dir is not None:
        run_dir.mkdir(parents=True, exist_ok=True)
        with (run_dir / "answers.jsonl").open("w", encoding="utf-8") as fh:
            for ans in answers:
                fh.write(json.dumps(ans.to_json(), sort_keys=True) + "\n")
    return answers


def build_cost_report(run_dir: str | Path, in_price_per_char: float,
                      out_price_per_char: float) -> CostReport:
    """Cost and time computed solely from persisted artifacts."""
    run_dir = Path(run_dir)
    ledger_path = run_dir / "ledger.json"
    if not ledger_path.exists():
        raise FileNotFoundError(f"missing ledger: {ledger_path}")
    ledger = UsageLedger.load(ledger_path)
    totals = ledger.totals()
    cost = (totals["input_chars"] * in_price_per_char
            + totals["output_chars"] * out_price_per_char)

    total_time_min = 0.0
    manifest_path = run_dir / "manifest.json"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        started = manifest.get("started_at")
        finished = manifest.get("finished_at")
        if started is not None and finished is not None:
            total_time_min = max(0.0, (finished - started) / 60.0)

    coverage = None
    report_path = run_dir / "report.json"
    if report_path.exists():
        coverage = json.loads(report_path.read_text(encoding="utf-8")).get("coverage")

    return CostReport(
        run_dir=str(run_dir),
        total_time_min=round(total_time_min, 3),
        total_cost_usd=cost,
        request_count=totals["requests"],
        coverage=coverage,
    )


def render_comparison(reports: list[CostReport]) -> str:
    """Plain-text table: one row per run (Time (min) / Cost (USD) layout)."""
    headers = ["Run", "Time (min)", "Cost (USD)", "Requests", "Coverage"]
    rows = [[Path(r.run_dir).name, f"{r.total_time_min:.1f}", f"{r.total_cost_usd:.2f}",
             str(r.request_count),
             "-" if r.coverage is None else f"{r.coverage:.2f}"] for r in reports]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    def fmt(cells):
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths))
    lines = [fmt(headers), "-+-".join("-" * w for w in widths)]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)

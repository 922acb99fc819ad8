"""LLM access with retry-on-error loops and exact usage accounting.

Two backends: a scripted one replaying fixture files (deterministic, used by
all tests) and a live HTTP chat-completions backend.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

log = logging.getLogger(__name__)

STAGES = (
    "schema_init", "schema_refine", "schema_repair",
    "script_init", "script_refine", "script_repair",
    "query_graph", "query_text", "query_hybrid", "synthesize",
)

ERROR_FEEDBACK_PREFIX = "PREVIOUS ATTEMPT FAILED: "


class StageExhausted(RuntimeError):
    """A retry loop consumed all attempts without a valid response."""

    def __init__(self, stage: str, attempts: int, last_error: str):
        super().__init__(f"stage {stage} exhausted after {attempts} attempts: {last_error}")
        self.stage = stage
        self.attempts = attempts
        self.last_error = last_error


class BackendConfigError(RuntimeError):
    """Fatal backend misconfiguration (missing fixture, missing endpoint)."""


class TransportError(RuntimeError):
    """Retryable transport-level failure of the live backend."""


@dataclass(frozen=True)
class PromptRequest:
    stage: str
    system_text: str
    user_text: str
    attempt: int = 1


@dataclass(frozen=True)
class PromptResponse:
    text: str
    input_chars: int
    output_chars: int
    latency_ms: int


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 4


@dataclass(frozen=True)
class UsageRecord:
    stage: str
    attempt: int
    input_chars: int
    output_chars: int
    latency_ms: int
    success: bool


class UsageLedger:
    """Append-only, thread-safe usage record list."""

    def __init__(self):
        self._records: list[UsageRecord] = []
        self._lock = threading.Lock()

    def append(self, record: UsageRecord) -> None:
        with self._lock:
            self._records.append(record)

    @property
    def records(self) -> tuple[UsageRecord, ...]:
        with self._lock:
            return tuple(self._records)

    def totals(self) -> dict[str, int]:
        recs = self.records
        return {
            "requests": len(recs),
            "input_chars": sum(r.input_chars for r in recs),
            "output_chars": sum(r.output_chars for r in recs),
            "latency_ms": sum(r.latency_ms for r in recs),
        }

    def to_json(self) -> list[dict]:
        return [r.__dict__ for r in self.records]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "UsageLedger":
        ledger = cls()
        for rec in json.loads(Path(path).read_text(encoding="utf-8")):
            ledger.append(UsageRecord(**rec))
        return ledger


class ScriptedBackend:
    """Replays fixture files named <stage>-<seq>.txt from a directory."""

    def __init__(self, fixtures_dir: str | Path):
        self.fixtures_dir = Path(fixtures_dir)
        self._counters: dict[str, int] = {}
        self._lock = threading.Lock()

    def send(self, request: PromptRequest) -> tuple[str, int]:
        with self._lock:
            seq = self._counters.get(request.stage, 0) + 1
            self._counters[request.stage] = seq
        path = self.fixtures_dir / f"{request.stage}-{seq}.txt"
        if not path.exists():
            raise BackendConfigError(
                f"no fixture for ({request.stage}, {seq}): expected {path}")
        text = path.read_text(encoding="utf-8")
        # deterministic synthetic latency so reports are byte-reproducible
        latency_ms = 20 + len(text) // 20
        return text, latency_ms


class LiveBackend:
    """HTTP chat-completions backend configured through environment variables."""

    def __init__(self, api_url: str | None = None, api_key: str | None = None,
                 model: str | None = None, timeout_s: float = 120.0):
        self.api_url = api_url or os.environ.get("FASTRAG_API_URL")
        self.api_key = api_key or os.environ.get("FASTRAG_API_KEY")
        self.model = model or os.environ.get("FASTRAG_MODEL")
        self.timeout_s = timeout_s
        if not self.api_url or not self.model:
            raise BackendConfigError(
                "live backend needs FASTRAG_API_URL and FASTRAG_MODEL")

    def send(self, request: PromptRequest) -> tuple[str, int]:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
        }
        t0 = time.monotonic()
        try:
            resp = requests.post(self.api_url, json=payload, headers=headers,
                                 timeout=self.timeout_s)
            resp.raise_for_status()
            body = resp.json()
            text = body["choices"][0]["message"]["content"]
        except Exception as exc:  # noqa: BLE001 - any transport/shape failure is retryable
            raise TransportError(str(exc)) from exc
        return text, int((time.monotonic() - t0) * 1000)


Validator = Callable[[PromptResponse], str | None]


class LlmGateway:
    """Uniform LLM access; every backend call lands in the usage ledger."""

    def __init__(self, backend, ledger: UsageLedger | None = None):
        self.backend = backend
        self.ledger = ledger or UsageLedger()

    def _send(self, request: PromptRequest) -> PromptResponse:
        text, latency_ms = self.backend.send(request)
        return PromptResponse(
            text=text,
            input_chars=len(request.system_text) + len(request.user_text),
            output_chars=len(text),
            latency_ms=latency_ms,
        )

    def _record(self, request: PromptRequest, response: PromptResponse,
                success: bool) -> None:
        self.ledger.append(UsageRecord(
            stage=request.stage, attempt=request.attempt,
            input_chars=response.input_chars, output_chars=response.output_chars,
            latency_ms=response.latency_ms, success=success))

    def complete(self, request: PromptRequest) -> PromptResponse:
        response = self._send(request)
        self._record(request, response, success=True)
        return response

    def complete_with_validation(self, request: PromptRequest, validator: Validator,
                                 policy: RetryPolicy,
                                 repair_stage: str | None = None) -> PromptResponse:
        """Retry until the validator accepts, feeding the error back to the LLM.

        Retries carry the validator message appended to the user text and use
        repair_stage (defaults to the original stage).
        """
        user_text = request.user_text
        last_error = "no attempts made"
        for attempt in range(1, policy.max_attempts + 1):
            stage = request.stage if attempt == 1 else (repair_stage or request.stage)
            req = replace(request, stage=stage, user_text=user_text, attempt=attempt)
            try:
                response = self._send(req)
            except TransportError as exc:
                last_error = f"transport failure: {exc}"
                self._record(req, PromptResponse("", len(req.system_text) + len(req.user_text), 0, 0),
                             success=False)
                continue
            error = validator(response)
            self._record(req, response, success=error is None)
            if error is None:
                return response
            last_error = error
            user_text = f"{user_text}\n\n{ERROR_FEEDBACK_PREFIX}{error}"
        raise StageExhausted(request.stage, policy.max_attempts, last_error)


def make_backend(config) -> ScriptedBackend | LiveBackend:
    kind = config.get("gateway.backend")
    if kind == "scripted":
        fixtures_dir = config.get("gateway.fixtures_dir")
        if not fixtures_dir:
            raise BackendConfigError("scripted backend needs gateway.fixtures_dir")
        return ScriptedBackend(fixtures_dir)
    if kind == "live":
        return LiveBackend()
    raise BackendConfigError(f"unknown backend: {kind}")

"""Parser-script learning with sandboxed execution verification."""

from __future__ import annotations

import json
import logging
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import prompts
from .gateway import LlmGateway, PromptRequest, PromptResponse, RetryPolicy, StageExhausted
from .ingest import Chunk
from .schema_learning import Step1Schema

log = logging.getLogger(__name__)

UNASSIGNED = "_unassigned"
STDERR_FEEDBACK_LIMIT = 2000


@dataclass
class ParserScript:
    source_code: str
    stage: str  # "section_splitter" or "section_parser"
    section: str | None = None
    verified_on: list[int] = field(default_factory=list)


@dataclass
class ExecutionResult:
    exit_status: int
    stdout: str
    stderr: str
    wall_ms: int
    timed_out: bool


@dataclass
class SandboxConfig:
    interpreter_command: list[str] = field(default_factory=lambda: [sys.executable])
    time_limit_ms: int = 10000
    max_output_bytes: int = 10 * 1024 * 1024
    isolate_workdir: bool = True

    @property
    def script_extension(self) -> str:
        base = Path(self.interpreter_command[0]).name
        if base.startswith("python"):
            return "py"
        if base in ("node", "nodejs"):
            return "js"
        return "txt"


def execute_script(source_code: str, input_text: str,
                   sandbox: SandboxConfig) -> ExecutionResult:
    """Run a script in a temp working directory: stdin in, JSON expected on stdout."""
    import time

    with tempfile.TemporaryDirectory(prefix="fastrag-sbx-") as tmp:
        script_path = Path(tmp) / f"script.{sandbox.script_extension}"
        script_path.write_text(source_code, encoding="utf-8")
        cmd = list(sandbox.interpreter_command) + [str(script_path)]
        t0 = time.monotonic()
        try:
            proc = subprocess.run(
                cmd, input=input_text.encode("utf-8"),
                capture_output=True, cwd=tmp,
                timeout=sandbox.time_limit_ms / 1000.0)
            timed_out = False
            exit_status = proc.returncode
            out, err = proc.stdout, proc.stderr
        except subprocess.TimeoutExpired as exc:
            timed_out = True
            exit_status = -1
            out = exc.stdout or b""
            err = exc.stderr or b""
        except FileNotFoundError as exc:
            raise RuntimeError(
                f"interpreter not found: {sandbox.interpreter_command[0]}") from exc
        wall_ms = int((time.monotonic() - t0) * 1000)
    cap = sandbox.max_output_bytes
    return ExecutionResult(
        exit_status=exit_status,
        stdout=out[:cap].decode("utf-8", errors="replace"),
        stderr=err[:cap].decode("utf-8", errors="replace"),
        wall_ms=wall_ms,
        timed_out=timed_out,
    )


def validate_parser_output(stdout: str, target_schema,
                           input_line_count: int | None = None) -> str | None:
    """Check stdout against the target schema.

    For a Step1Schema target (the section splitter) the output must be a JSON
    object assigning every 1-based input line number to a known section name,
    each line exactly once.
    """
    try:
        data = json.loads(stdout)
    except json.JSONDecodeError as exc:
        return f"output is not valid JSON: {exc}"
    if isinstance(target_schema, Step1Schema):
        if not isinstance(data, dict):
            return "splitter output must be a JSON object of line-number -> section"
        if input_line_count is None:
            return "splitter validation needs the input line count"
        allowed = set(target_schema.section_names) | {UNASSIGNED}
        expected = {str(i) for i in range(1, input_line_count + 1)}
        missing = sorted(expected - set(data), key=int)
        if missing:
            return f"splitter output missing line {missing[0]} of {input_line_count}"
        extra = sorted(set(data) - expected)
        if extra:
            return f"splitter output has unexpected line key {extra[0]}"
        for num, section in data.items():
            if section not in allowed:
                return f"line {num} assigned to unknown section {section!r}"
        return None
    try:
        jsonschema.validate(data, target_schema,
                            cls=jsonschema.Draft202012Validator)
    except jsonschema.ValidationError as exc:
        path = "$" + "".join(f"[{p!r}]" for p in exc.absolute_path)
        return f"output violates the section schema at {path}: {exc.message}"
    return None


def extract_code(text: str) -> str:
    """Strip a surrounding markdown code fence, if any."""
    stripped = text.strip()
    if stripped.startswith("```"):
        first_nl = stripped.index("\n") if "\n" in stripped else len(stripped)
        stripped = stripped[first_nl + 1:]
        if stripped.rstrip().endswith("```"):
            stripped = stripped.rstrip()[:-3]
    return stripped


def learn_parser(samples: list[Chunk], target_schema, stage: str,
                 gateway: LlmGateway, policy: RetryPolicy,
                 sandbox: SandboxConfig, section: str | None = None) -> ParserScript:
    """Obtain a parser script, verifying each response by executing it on the
    sample that produced it."""
    if not samples:
        raise ValueError("learn_parser needs at least one sample")
    if stage not in ("section_splitter", "section_parser"):
        raise ValueError(f"unknown parser stage: {stage}")
    system = prompts.template("system")
    splitter = stage == "section_splitter"
    schema_text = (json.dumps(
        [{"name": n, "description": d} for n, d in target_schema.sections], indent=2)
        if splitter else json.dumps(target_schema, indent=2))

    source: str | None = None
    verified: list[int] = []
    for idx, sample in enumerate(samples):
        n_lines = len(sample.lines)

        def validator(response: PromptResponse) -> str | None:
            code = extract_code(response.text)
            result = execute_script(code, sample.text, sandbox)
            if result.timed_out:
                return f"execution timed out after {sandbox.time_limit_ms} ms"
            if result.exit_status != 0:
                return ("execution failed (exit "
                        f"{result.exit_status}): {result.stderr[:STDERR_FEEDBACK_LIMIT]}")
            return validate_parser_output(result.stdout, target_schema, n_lines)

        if idx == 0:
            prompt_stage = "script_init"
            name = "splitter_init" if splitter else "parser_init"
            user = prompts.render(name, schema=schema_text, sample=sample.text,
                                  section=section or "")
        else:
            prompt_stage = "script_refine"
            name = "splitter_refine" if splitter else "parser_refine"
            user = prompts.render(name, schema=schema_text, sample=sample.text,
                                  script=source or "", section=section or "")
        try:
            response = gateway.complete_with_validation(
                PromptRequest(stage=prompt_stage, system_text=system, user_text=user),
                validator, policy, repair_stage="script_repair")
        except StageExhausted as exc:
            raise StageExhausted(exc.stage, exc.attempts,
                                 f"sample {idx}: {exc.last_error}") from exc
        source = extract_code(response.text)
        verified.append(sample.chunk_id)
    assert source is not None
    return ParserScript(source_code=source, stage=stage, section=section,
                        verified_on=verified)

#!/usr/bin/env python3
"""Self-test for the fixture scripts.

Runs every healthy script on its bundled corpus and validates the output
against the corpus schema; checks stdout determinism; and checks that each
broken variant fails in its documented mode. Prints one line per check and
exits nonzero on any failure. Standalone on purpose: only the interpreter,
subprocess, and jsonschema are used.

    python3 fixtures/selftest.py
"""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema

from generate import SECTIONS, SPLITTERS

ROOT = Path(__file__).resolve().parent
TIME_LIMIT_S = 10.0
BROKEN_TIME_LIMIT_S = 0.1

failures = []


def check(name, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
    if not ok:
        failures.append(name)


def run_script(path, input_text, timeout_s=TIME_LIMIT_S):
    return subprocess.run(
        [sys.executable, str(path)], input=input_text.encode("utf-8"),
        capture_output=True, timeout=timeout_s)


def corpus_documents(corpus):
    pattern = "*.cfg" if corpus == "configs" else "*.log"
    paths = sorted((ROOT / "corpora" / corpus).glob(pattern))
    return [(p.name, p.read_text(encoding="utf-8").splitlines()) for p in paths]


def check_splitter(corpus, section_lines):
    """Run the splitter per document; collect section -> lines on the way."""
    script = ROOT / "scripts" / SPLITTERS[corpus]
    known = set(SECTIONS[corpus]) | {"_unassigned"}
    for doc, lines in corpus_documents(corpus):
        name = f"{SPLITTERS[corpus]} on {doc}"
        text = "\n".join(lines)
        proc = run_script(script, text)
        again = run_script(script, text)
        if proc.returncode != 0:
            check(name, False, proc.stderr.decode()[:200])
            continue
        if proc.stdout != again.stdout:
            check(name, False, "stdout is not deterministic")
            continue
        mapping = json.loads(proc.stdout)
        expected = {str(i) for i in range(1, len(lines) + 1)}
        if set(mapping) != expected:
            check(name, False, "line keys do not cover every input line")
            continue
        unknown = sorted(set(mapping.values()) - known)
        if unknown:
            check(name, False, f"unknown sections: {unknown}")
            continue
        check(name, True)
        for num, section in mapping.items():
            section_lines.setdefault(section, []).append(lines[int(num) - 1])


def check_parsers(corpus, section_lines):
    schema = json.loads((ROOT / "schemas" / f"{corpus}.json").read_text(encoding="utf-8"))
    for section, script_name in sorted(SECTIONS[corpus].items()):
        name = f"{script_name} on {section} section"
        text = "\n".join(section_lines.get(section, []))
        proc = run_script(ROOT / "scripts" / script_name, text)
        if proc.returncode != 0:
            check(name, False, proc.stderr.decode()[:200])
            continue
        if proc.stdout != run_script(ROOT / "scripts" / script_name, text).stdout:
            check(name, False, "stdout is not deterministic")
            continue
        entities = json.loads(proc.stdout)
        try:
            jsonschema.validate(entities, schema["properties"][section],
                                cls=jsonschema.Draft202012Validator)
        except jsonschema.ValidationError as exc:
            check(name, False, exc.message[:200])
            continue
        check(name, len(entities) > 0, "" if entities else "no entities produced")


def check_broken():
    sample = (ROOT / "corpora" / "configs" / "as1border1.cfg").read_text(encoding="utf-8")
    broken = ROOT / "scripts" / "broken"
    schema = json.loads((ROOT / "schemas" / "configs.json").read_text(encoding="utf-8"))

    proc = run_script(broken / "syntax_error.py", sample)
    check("broken/syntax_error.py",
          proc.returncode != 0 and b"SyntaxError" in proc.stderr,
          f"exit {proc.returncode}")

    proc = run_script(broken / "schema_violation.py", sample)
    violates = False
    if proc.returncode == 0:
        try:
            jsonschema.validate(json.loads(proc.stdout), schema["properties"]["Device"],
                                cls=jsonschema.Draft202012Validator)
        except jsonschema.ValidationError:
            violates = True
    check("broken/schema_violation.py", violates,
          "" if violates else "expected clean exit with schema-invalid output")

    try:
        run_script(broken / "timeout_loop.py", sample, timeout_s=BROKEN_TIME_LIMIT_S)
        check("broken/timeout_loop.py", False, "expected a timeout")
    except subprocess.TimeoutExpired:
        check("broken/timeout_loop.py", True)


def main():
    for corpus in ("configs", "logs"):
        section_lines = {}
        check_splitter(corpus, section_lines)
        check_parsers(corpus, section_lines)
    check_broken()
    print(f"{'PASS' if not failures else 'FAIL'}: "
          f"{len(failures)} failing fixture(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

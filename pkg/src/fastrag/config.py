"""Flat JSON configuration with dotted keys and CLI > file > default precedence."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path
from typing import Any

DEFAULTS: dict[str, Any] = {
    "ingest.chunk_tokens": 1000,
    "ingest.overlap_tokens": 0,
    "sampling.n_clusters": 6,
    "sampling.n_terms_per_cluster": 4,
    "sampling.coverage_threshold": 1.0,
    "sampling.random_seed": 42,
    "gateway.backend": "scripted",
    "gateway.fixtures_dir": None,
    "gateway.max_attempts": 4,
    "gateway.in_price_per_char": 0.0,
    "gateway.out_price_per_char": 0.0,
    "sandbox.interpreter_command": [sys.executable],
    "sandbox.time_limit_ms": 10000,
    "sandbox.max_output_bytes": 10 * 1024 * 1024,
    "schema.max_depth": 3,
    "schema.max_properties": 15,
    "extraction.step2_chunk_tokens": 100000,
    "extraction.step2_n_clusters": 2,
    "extraction.step2_n_terms_per_cluster": 4,
    "extraction.workers": 4,
    "retrieval.table_byte_budget": 16384,
    "retrieval.text_search_limit": 10,
}

ENV_BACKEND = "FASTRAG_BACKEND"


class ConfigError(ValueError):
    """Bad configuration supplied by the user."""


class Config:
    """Resolved configuration: CLI overrides > config file > built-in default."""

    def __init__(self, file_values: dict[str, Any] | None = None,
                 overrides: dict[str, Any] | None = None):
        self._file = dict(file_values or {})
        self._overrides = dict(overrides or {})
        unknown = [k for k in list(self._file) + list(self._overrides) if k not in DEFAULTS]
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

    @classmethod
    def load(cls, path: str | Path | None, overrides: dict[str, Any] | None = None) -> "Config":
        values: dict[str, Any] = {}
        if path is not None:
            p = Path(path)
            if not p.exists():
                raise ConfigError(f"config file not found: {p}")
            try:
                values = json.loads(p.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
            if not isinstance(values, dict):
                raise ConfigError(f"config file {p} must hold a JSON object")
        return cls(values, overrides)

    def get(self, key: str) -> Any:
        if key in self._overrides:
            return self._overrides[key]
        if key == "gateway.backend" and os.environ.get(ENV_BACKEND):
            return os.environ[ENV_BACKEND]
        if key in self._file:
            return self._file[key]
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key: {key}")
        return DEFAULTS[key]

    def snapshot(self) -> dict[str, Any]:
        """Every key with its resolved value, for the run manifest."""
        return {k: self.get(k) for k in sorted(DEFAULTS)}

"""Prompt template loading. Templates are tunable assets, not contracts."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=None)
def template(name: str) -> str:
    return (resources.files("fastrag") / "prompts" / f"{name}.txt").read_text(encoding="utf-8")


def render(name: str, **kwargs: str) -> str:
    # literal replacement, not str.format: sample text may contain braces
    text = template(name)
    for key, value in kwargs.items():
        text = text.replace("{" + key + "}", str(value))
    return text

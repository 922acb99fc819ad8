"""Corpus loading and line-aligned chunking."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Line:
    doc_id: str
    number: int  # 1-based within its document
    text: str


@dataclass
class SourceCorpus:
    documents: list[tuple[str, list[Line]]]

    def all_lines(self) -> list[Line]:
        return [ln for _, lines in self.documents for ln in lines]

    def document_text(self, doc_id: str) -> str:
        for did, lines in self.documents:
            if did == doc_id:
                return "\n".join(ln.text for ln in lines)
        raise KeyError(f"unknown document: {doc_id}")


@dataclass
class Chunk:
    chunk_id: int
    lines: list[Line]
    token_count: int

    @property
    def text(self) -> str:
        return "\n".join(ln.text for ln in self.lines)


def estimate_tokens(text: str) -> int:
    """Approximate token count as ceil(chars / 4)."""
    return -(-len(text) // 4)


def load_corpus(paths: list[str | Path]) -> SourceCorpus:
    """Load text files into numbered lines, in path order.

    Missing files are fatal; invalid UTF-8 bytes are replaced with a warning.
    """
    documents = []
    for path in paths:
        p = Path(path)
        if not p.exists():
            raise FileNotFoundError(f"source file not found: {p}")
        raw = p.read_bytes()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            log.warning("invalid UTF-8 in %s; bad bytes replaced", p)
            text = raw.decode("utf-8", errors="replace")
        lines = [Line(str(p), i + 1, t) for i, t in enumerate(text.splitlines())]
        if not lines:
            log.warning("empty source file: %s", p)
        documents.append((str(p), lines))
    return SourceCorpus(documents)


def chunk_corpus(corpus: SourceCorpus, chunk_tokens: int,
                 overlap_tokens: int = 0) -> list[Chunk]:
    """Partition the corpus into line-aligned chunks of at most chunk_tokens.

    Consecutive chunks within one document share the trailing lines of the
    predecessor whose token sum fits in overlap_tokens. Chunks never span
    document boundaries, and a line longer than the chunk budget becomes a
    singleton oversized chunk.
    """
    if chunk_tokens <= 0:
        raise ValueError("chunk_tokens must be positive")
    if overlap_tokens >= chunk_tokens:
        raise ValueError("overlap_tokens must be smaller than chunk_tokens")

    chunks: list[Chunk] = []
    cid = 0
    for _, lines in corpus.documents:
        i = 0
        prev: list[Line] | None = None
        while i < len(lines):
            cur: list[Line] = []
            tok = 0
            if prev is not None and overlap_tokens > 0:
                carried: list[Line] = []
                s = 0
                for ln in reversed(prev):
                    t = estimate_tokens(ln.text)
                    if s + t > overlap_tokens:
                        break
                    carried.append(ln)
                    s += t
                cur = list(reversed(carried))
                tok = s
            # Always take at least one new line so the walk makes progress.
            first = estimate_tokens(lines[i].text)
            while cur and tok + first > chunk_tokens:
                tok -= estimate_tokens(cur[0].text)
                cur = cur[1:]
            if first > chunk_tokens:
                log.warning("line %s:%d exceeds chunk budget (%d tokens); "
                            "emitting oversized chunk",
                            lines[i].doc_id, lines[i].number, first)
            cur.append(lines[i])
            tok += first
            i += 1
            while i < len(lines):
                t = estimate_tokens(lines[i].text)
                if tok + t > chunk_tokens:
                    break
                cur.append(lines[i])
                tok += t
                i += 1
            chunks.append(Chunk(cid, cur, tok))
            cid += 1
            prev = cur
    return chunks

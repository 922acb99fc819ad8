"""Keyword extraction via line clustering, and greedy representative-chunk selection."""

from __future__ import annotations

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .ingest import Chunk, SourceCorpus

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


def preprocess_lines(corpus: SourceCorpus) -> list[list[str]]:
    """Tokenize every corpus line, preserving line order."""
    return [tokenize(ln.text) for ln in corpus.all_lines()]


@dataclass
class KeywordExtractionConfig:
    n_clusters: int
    n_terms_per_cluster: int
    random_seed: int = 42


@dataclass
class TermLineMatrix:
    terms: list[str]  # lexicographically sorted
    rows: np.ndarray  # shape (n_lines, n_terms), term counts


@dataclass
class TfIdfMatrix:
    terms: list[str]
    rows: np.ndarray  # shape (n_chunks, n_terms), tf-idf weights


@dataclass
class SampleSelectionConfig:
    coverage_threshold: float = 1.0


@dataclass
class SampleSelection:
    selected_chunk_ids: list[int]
    covered_terms: set[str]
    achieved_coverage: float
    per_step_gains: list[tuple[int, float]] = field(default_factory=list)


def build_frequency_matrix(token_lines: list[list[str]]) -> TermLineMatrix:
    terms = sorted({t for toks in token_lines for t in toks})
    index = {t: j for j, t in enumerate(terms)}
    rows = np.zeros((len(token_lines), len(terms)), dtype=np.int64)
    for i, toks in enumerate(token_lines):
        for t, c in Counter(toks).items():
            rows[i, index[t]] = c
    return TermLineMatrix(terms, rows)


def kmeans_cluster(matrix: TermLineMatrix,
                   config: KeywordExtractionConfig) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's k-means with k-means++ seeding; returns (assignments, centroids).

    Deterministic for a fixed random_seed. Converges on unchanged assignments
    or after 100 iterations. n_clusters larger than the number of distinct
    rows is reduced with a warning.
    """
    if matrix.rows.shape[0] == 0:
        raise ValueError("cannot cluster an empty matrix")
    if config.n_clusters < 1:
        raise ValueError("n_clusters must be >= 1")
    X = matrix.rows.astype(np.float64)
    n = X.shape[0]
    n_distinct = len({tuple(r) for r in matrix.rows.tolist()})
    k = config.n_clusters
    if k > n_distinct:
        log.warning("n_clusters=%d exceeds %d distinct rows; reducing", k, n_distinct)
        k = n_distinct

    rng = np.random.default_rng(config.random_seed)
    # k-means++ seeding
    centers = np.empty((k, X.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centers[0] = X[first]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining points coincide with a chosen center
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[c] = X[idx]
        d2 = np.minimum(d2, ((X - centers[c]) ** 2).sum(axis=1))

    assign = np.full(n, -1, dtype=np.int64)
    for _ in range(100):
        dists = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = dists.argmin(axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            members = X[assign == c]
            if len(members):  # empty clusters keep their previous centroid
                centers[c] = members.mean(axis=0)
    return assign, centers


def extract_keywords(matrix: TermLineMatrix,
                     config: KeywordExtractionConfig) -> set[str]:
    """Per cluster, pick the n_t terms with the largest centroid coordinates."""
    _, centers = kmeans_cluster(matrix, config)
    keywords: set[str] = set()
    for centroid in centers:
        candidates = [(matrix.terms[j], centroid[j])
                      for j in range(len(matrix.terms)) if centroid[j] > 0]
        candidates.sort(key=lambda tc: (-tc[1], tc[0]))
        keywords.update(t for t, _ in candidates[:config.n_terms_per_cluster])
    return keywords


def chunk_entropy(filtered_tokens: list[str]) -> float:
    """Shannon entropy (bits) of the chunk's term-frequency distribution."""
    if not filtered_tokens:
        return 0.0
    counts = Counter(filtered_tokens)
    total = len(filtered_tokens)
    return -sum((c / total) * math.log2(c / total) for c in counts.values())


def compute_tfidf(filtered_chunks: list[list[str]]) -> TfIdfMatrix:
    """tf = raw count; idf = ln((1+N)/(1+df)) + 1."""
    terms = sorted({t for toks in filtered_chunks for t in toks})
    index = {t: j for j, t in enumerate(terms)}
    n = len(filtered_chunks)
    rows = np.zeros((n, len(terms)), dtype=np.float64)
    df = np.zeros(len(terms), dtype=np.int64)
    for i, toks in enumerate(filtered_chunks):
        for t, c in Counter(toks).items():
            rows[i, index[t]] = c
            df[index[t]] += 1
    idf = np.log((1 + n) / (1 + df)) + 1 if len(terms) else np.zeros(0)
    return TfIdfMatrix(terms, rows * idf)


def select_samples(chunks: list[Chunk], keywords: set[str],
                   config: SampleSelectionConfig | None = None) -> SampleSelection:
    """Greedy sample selection: maximize |new terms| x chunk entropy.

    Stops when coverage reaches the threshold or no candidate contributes a
    new term. Ties (including all-zero gains) break on most new terms, then
    lowest chunk_id.
    """
    config = config or SampleSelectionConfig()
    if not keywords:
        log.warning("empty keyword set; selection is vacuous")
        return SampleSelection([], set(), 1.0)

    filtered = [[t for t in tokenize(ch.text) if t in keywords] for ch in chunks]
    tfidf = compute_tfidf(filtered)
    n_terms = len(tfidf.terms)
    if n_terms == 0:
        log.warning("no keyword occurs in any chunk; selection is vacuous")
        return SampleSelection([], set(), 1.0)

    entropies = [chunk_entropy(toks) for toks in filtered]
    term_sets = [set(toks) for toks in filtered]

    selected: list[int] = []
    selected_set: set[int] = set()
    covered: set[str] = set()
    gains_log: list[tuple[int, float]] = []
    while len(covered) / n_terms < config.coverage_threshold:
        best: tuple[float, int, int, int] | None = None  # (gain, new_count, chunk_id, index)
        for i, ch in enumerate(chunks):
            if ch.chunk_id in selected_set:
                continue
            new_count = len(term_sets[i] - covered)
            gain = new_count * entropies[i]
            if best is None or (gain, new_count, -ch.chunk_id) > (best[0], best[1], -best[2]):
                best = (gain, new_count, ch.chunk_id, i)
        if best is None or best[1] == 0:
            break  # nothing left can add a new term
        gain, _, cid, idx = best
        selected.append(cid)
        selected_set.add(cid)
        covered |= term_sets[idx]
        gains_log.append((cid, gain))
    return SampleSelection(selected, covered, len(covered) / n_terms, gains_log)

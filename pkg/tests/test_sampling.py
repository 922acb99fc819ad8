"""Keyword extraction, entropy/TF-IDF numerics, and greedy sample selection."""

import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastrag.ingest import Chunk, Line
from fastrag.sampling import (KeywordExtractionConfig, SampleSelectionConfig,
                              build_frequency_matrix, chunk_entropy, compute_tfidf,
                              extract_keywords, kmeans_cluster, preprocess_lines,
                              select_samples, tokenize)

from .conftest import make_corpus


def word_chunk(cid, words):
    text = " ".join(words)
    return Chunk(cid, [Line("d", 1, text)], token_count=len(text) // 4 + 1)


class TestTokenize:
    def test_hello_world(self):
        assert tokenize("Hello, World!") == ["hello", "world"]

    def test_log_line(self):
        assert tokenize("GET /v2/54fadb41 HTTP/1.1 status: 200") == \
            ["get", "v2", "54fadb41", "http", "1", "1", "status", "200"]

    def test_empty(self):
        assert tokenize("") == []

    def test_preprocess_preserves_line_order(self):
        corpus = make_corpus(("d", ["b a", "", "c"]))
        assert preprocess_lines(corpus) == [["b", "a"], [], ["c"]]


class TestFrequencyMatrix:
    def test_single_line_counts(self):
        m = build_frequency_matrix([["a", "b", "a"]])
        assert m.terms == ["a", "b"]
        assert m.rows.tolist() == [[2, 1]]

    def test_identical_lines_identical_rows(self):
        m = build_frequency_matrix([["x", "y"], ["x", "y"]])
        assert m.rows[0].tolist() == m.rows[1].tolist()

    def test_matches_counting_oracle(self):
        lines = [["a", "b"], ["b", "b", "c"], ["d"], ["a", "d", "a"], []]
        m = build_frequency_matrix(lines)
        assert m.terms == sorted({t for toks in lines for t in toks})
        for i, toks in enumerate(lines):
            counts = Counter(toks)
            for j, term in enumerate(m.terms):
                assert m.rows[i, j] == counts.get(term, 0)


class TestKmeans:
    def test_identical_rows_single_cluster(self):
        m = build_frequency_matrix([["a", "b"]] * 4)
        assign, centers = kmeans_cluster(m, KeywordExtractionConfig(1, 1))
        assert set(assign.tolist()) == {0}
        assert centers[0].tolist() == m.rows[0].tolist()

    def test_two_separated_groups(self):
        lines = [["a", "a", "a"]] * 3 + [["z", "z", "z"]] * 3
        m = build_frequency_matrix(lines)
        assign, _ = kmeans_cluster(m, KeywordExtractionConfig(2, 1))
        first, second = set(assign[:3].tolist()), set(assign[3:].tolist())
        assert len(first) == 1 and len(second) == 1 and first != second

    def test_fixed_seed_is_deterministic(self):
        lines = [[t] * (i % 3 + 1) for i, t in enumerate("abcdefgh")]
        m = build_frequency_matrix(lines)
        cfg = KeywordExtractionConfig(3, 1, random_seed=7)
        baseline = kmeans_cluster(m, cfg)
        for _ in range(10):
            assign, centers = kmeans_cluster(m, cfg)
            assert np.array_equal(assign, baseline[0])
            assert np.array_equal(centers, baseline[1])

    def test_excess_clusters_reduced(self):
        m = build_frequency_matrix([["a"], ["a"]])
        assign, centers = kmeans_cluster(m, KeywordExtractionConfig(5, 1))
        assert centers.shape[0] == 1

    def test_empty_matrix_rejected(self):
        m = build_frequency_matrix([])
        with pytest.raises(ValueError):
            kmeans_cluster(m, KeywordExtractionConfig(1, 1))


class TestExtractKeywords:
    def test_dominant_coordinate(self):
        m = build_frequency_matrix([["a"] * 5 + ["b"]])
        assert extract_keywords(m, KeywordExtractionConfig(1, 1)) == {"a"}

    def test_matches_centroid_argmax_oracle(self):
        lines = [["a", "a", "b"]] * 3 + [["z", "z", "y"]] * 3
        m = build_frequency_matrix(lines)
        cfg = KeywordExtractionConfig(2, 1, random_seed=3)
        keywords = extract_keywords(m, cfg)
        _, centers = kmeans_cluster(m, cfg)
        expected = set()
        for centroid in centers:
            ranked = sorted(((m.terms[j], centroid[j]) for j in range(len(m.terms))
                             if centroid[j] > 0), key=lambda tc: (-tc[1], tc[0]))
            expected.update(t for t, _ in ranked[:1])
        assert keywords == expected

    @given(st.lists(st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=5),
                    min_size=1, max_size=12),
           st.integers(min_value=1, max_value=4),
           st.integers(min_value=1, max_value=3))
    @settings(max_examples=40, deadline=None)
    def test_keyword_count_bound(self, lines, n_c, n_t):
        m = build_frequency_matrix(lines)
        keywords = extract_keywords(m, KeywordExtractionConfig(n_c, n_t))
        assert len(keywords) <= n_c * n_t


class TestEntropy:
    def test_single_symbol(self):
        assert chunk_entropy(["x", "x", "x"]) == 0.0

    def test_uniform_four(self):
        assert abs(chunk_entropy(["a", "b", "c", "d"]) - 2.0) < 1e-9

    def test_two_to_one(self):
        expected = -(2 / 3 * math.log2(2 / 3) + 1 / 3 * math.log2(1 / 3))
        assert abs(chunk_entropy(["a", "a", "b"]) - expected) < 1e-9

    def test_empty(self):
        assert chunk_entropy([]) == 0.0

    @given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=30))
    @settings(max_examples=60, deadline=None)
    def test_entropy_bounds(self, tokens):
        h = chunk_entropy(tokens)
        assert -1e-12 <= h <= math.log2(len(set(tokens))) + 1e-9


class TestTfidf:
    def test_term_in_every_chunk(self):
        m = compute_tfidf([["t"], ["t"], ["t"], ["t"]])
        assert np.allclose(m.rows, 1.0, atol=1e-9)  # idf = ln(5/5)+1 = 1

    def test_term_in_one_of_four(self):
        m = compute_tfidf([["t", "t"], [], [], []])
        expected = 2 * (math.log(5 / 2) + 1)
        assert abs(m.rows[0, 0] - expected) < 1e-9

    def test_empty_vocabulary(self):
        m = compute_tfidf([[], []])
        assert m.terms == []
        assert m.rows.shape == (2, 0)


class TestSelectSamples:
    def test_single_chunk_covers_everything(self):
        chunks = [word_chunk(0, ["k1", "k2", "k3"]), word_chunk(1, ["k1"])]
        sel = select_samples(chunks, {"k1", "k2", "k3"})
        assert sel.selected_chunk_ids == [0]
        assert sel.achieved_coverage == 1.0
        assert len(sel.per_step_gains) == 1

    def test_greedy_skips_dominated_chunk(self):
        chunks = [word_chunk(0, ["k1", "k2"]), word_chunk(1, ["k2"]),
                  word_chunk(2, ["k3"])]
        sel = select_samples(chunks, {"k1", "k2", "k3"})
        assert sel.selected_chunk_ids == [0, 2]

    def test_empty_keywords_vacuous(self):
        sel = select_samples([word_chunk(0, ["a"])], set())
        assert sel.selected_chunk_ids == []
        assert sel.achieved_coverage == 1.0

    def test_no_keyword_in_any_chunk_vacuous(self):
        sel = select_samples([word_chunk(0, ["a"])], {"missing"})
        assert sel.selected_chunk_ids == []
        assert sel.achieved_coverage == 1.0

    def test_threshold_stops_early(self):
        chunks = [word_chunk(0, ["k1", "k2"]), word_chunk(1, ["k3", "k4"])]
        sel = select_samples(chunks, {"k1", "k2", "k3", "k4"},
                             SampleSelectionConfig(coverage_threshold=0.5))
        assert len(sel.selected_chunk_ids) == 1
        assert sel.achieved_coverage >= 0.5

    def test_never_selects_zero_gain_chunk(self):
        chunks = [word_chunk(0, ["k1"]), word_chunk(1, ["k1"]),
                  word_chunk(2, ["k2"])]
        sel = select_samples(chunks, {"k1", "k2"})
        assert sorted(sel.selected_chunk_ids) in ([0, 2], [2, 0])
        assert 1 not in sel.selected_chunk_ids

    def test_deterministic(self):
        chunks = [word_chunk(i, [f"k{j}" for j in range(i % 5 + 1)])
                  for i in range(8)]
        keywords = {f"k{j}" for j in range(5)}
        assert select_samples(chunks, keywords).selected_chunk_ids == \
            select_samples(chunks, keywords).selected_chunk_ids

    @given(st.lists(st.lists(st.sampled_from([f"k{i}" for i in range(6)]),
                             min_size=0, max_size=6), min_size=1, max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_coverage_is_maximal(self, chunk_words):
        chunks = [word_chunk(i, words or ["noise"])
                  for i, words in enumerate(chunk_words)]
        keywords = {f"k{i}" for i in range(6)}
        sel = select_samples(chunks, keywords)
        union = {t for words in chunk_words for t in words if t in keywords}
        if union:
            covered = {t for i in sel.selected_chunk_ids
                       for t in chunk_words[i] if t in keywords}
            assert covered == union
            assert sel.achieved_coverage == 1.0

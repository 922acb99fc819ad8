"""BM25 text index over Line nodes, with a small query grammar.

Query grammar: space-separated terms are AND; `OR` separates alternatives;
"quoted phrases" match contiguously; a trailing `*` makes a prefix term and a
trailing `~` allows edit distance 1.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .sampling import tokenize

BM25_K1 = 1.2
BM25_B = 0.75


class TextQueryError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# term kinds: ("term", token), ("prefix", stem), ("fuzzy", token), ("phrase", [tokens])
Term = tuple


def parse_text_query(query: str) -> list[list[Term]]:
    """Parse into OR-groups of AND-terms."""
    groups: list[list[Term]] = [[]]
    i, n = 0, len(query)
    while i < n:
        if query[i].isspace():
            i += 1
            continue
        if query[i] == '"':
            end = query.find('"', i + 1)
            if end == -1:
                raise TextQueryError("unterminated phrase quote", i)
            tokens = tokenize(query[i + 1:end])
            if not tokens:
                raise TextQueryError("empty phrase", i)
            groups[-1].append(("phrase", tokens))
            i = end + 1
            continue
        j = i
        while j < n and not query[j].isspace() and query[j] != '"':
            j += 1
        word = query[i:j]
        if word == "OR":
            if not groups[-1]:
                raise TextQueryError("OR without a left-hand term", i)
            groups.append([])
        elif word.endswith("*"):
            stems = tokenize(word[:-1])
            if len(stems) != 1:
                raise TextQueryError("prefix match needs a single token", i)
            groups[-1].append(("prefix", stems[0]))
        elif word.endswith("~"):
            toks = tokenize(word[:-1])
            if len(toks) != 1:
                raise TextQueryError("fuzzy match needs a single token", i)
            groups[-1].append(("fuzzy", toks[0]))
        else:
            for tok in tokenize(word):
                groups[-1].append(("term", tok))
        i = j
    if not groups[-1]:
        raise TextQueryError("query has no terms" if len(groups) == 1
                             else "OR without a right-hand term", n)
    return groups


def edit_distance_leq1(a: str, b: str) -> bool:
    if a == b:
        return True
    la, lb = len(a), len(b)
    if abs(la - lb) > 1:
        return False
    if la == lb:  # one substitution
        return sum(x != y for x, y in zip(a, b)) == 1
    if la > lb:
        a, b, la, lb = b, a, lb, la
    # one insertion into a
    i = 0
    while i < la and a[i] == b[i]:
        i += 1
    return a[i:] == b[i + 1:]


@dataclass
class TextHit:
    doc_key: int
    score: float


class TextIndex:
    """BM25 (k1=1.2, b=0.75) over tokenized documents keyed by integer ids."""

    def __init__(self, docs: list[tuple[int, list[str]]]):
        self.docs = docs
        self.tokens = {key: toks for key, toks in docs}
        self.counts = {key: Counter(toks) for key, toks in docs}
        self.doc_len = {key: len(toks) for key, toks in docs}
        self.n_docs = len(docs)
        self.avg_len = (sum(self.doc_len.values()) / self.n_docs) if self.n_docs else 0.0
        self.df: Counter = Counter()
        for key, toks in docs:
            self.df.update(set(toks))
        self.vocab = sorted(self.df)

    def _idf(self, token: str) -> float:
        df = self.df.get(token, 0)
        return math.log((self.n_docs - df + 0.5) / (df + 0.5) + 1)

    def _bm25(self, key: int, token: str) -> float:
        tf = self.counts[key].get(token, 0)
        if tf == 0:
            return 0.0
        dl = self.doc_len[key]
        denom = tf + BM25_K1 * (1 - BM25_B + BM25_B * dl / self.avg_len)
        return self._idf(token) * tf * (BM25_K1 + 1) / denom

    def _match_tokens(self, key: int, term: Term) -> list[str]:
        """Index tokens of the document that satisfy the query term."""
        kind, value = term
        toks = set(self.tokens[key])
        if kind == "term":
            return [value] if value in toks else []
        if kind == "prefix":
            return sorted(t for t in toks if t.startswith(value))
        if kind == "fuzzy":
            return sorted(t for t in toks if edit_distance_leq1(t, value))
        if kind == "phrase":
            seq = self.tokens[key]
            k = len(value)
            for i in range(len(seq) - k + 1):
                if seq[i:i + k] == value:
                    return list(value)
            return []
        raise ValueError(f"unknown term kind: {kind}")

    def search(self, query: str, limit: int | None = None) -> list[TextHit]:
        groups = parse_text_query(query)
        hits: list[TextHit] = []
        for key, _ in self.docs:
            best_score = None
            for group in groups:
                matched: list[str] = []
                ok = True
                for term in group:
                    toks = self._match_tokens(key, term)
                    if not toks:
                        ok = False
                        break
                    matched.extend(toks)
                if ok:
                    score = sum(self._bm25(key, t) for t in matched)
                    if best_score is None or score > best_score:
                        best_score = score
            if best_score is not None:
                hits.append(TextHit(key, best_score))
        hits.sort(key=lambda h: (-h.score, h.doc_key))
        return hits[:limit] if limit is not None else hits

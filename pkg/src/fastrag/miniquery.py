"""Parser and executor for the Cypher-like mini query language.

    query   := "MATCH" pattern ("WHERE" cond)? "RETURN" item ("," item)* ("LIMIT" int)?
    pattern := node ("-[" REL "]->" node)*
    node    := "(" var (":" Label)? ")"
    cond    := term (("AND"|"OR") term)*    (left-associative)
    term    := var "." prop op literal | "TEXT(" var "," string ")"
    op      := "=" | "<>" | "CONTAINS"
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .kg import KnowledgeGraph, Node, text_search

log = logging.getLogger(__name__)

GRAMMAR_DOC = __doc__.split("\n", 1)[1].strip()

KEYWORDS = {"MATCH", "WHERE", "RETURN", "LIMIT", "AND", "OR", "TEXT", "CONTAINS"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>\]->)
  | (?P<lbracket>-\[)
  | (?P<neq><>)
  | (?P<sym>[():,.=])
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)


class QueryParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass
class Token:
    kind: str
    value: str
    pos: int


def _lex(text: str) -> list[Token]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise QueryParseError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), i))
        i = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


@dataclass
class PatternNode:
    var: str
    label: str | None


@dataclass
class Condition:
    kind: str  # "prop" or "text"
    var: str
    prop: str | None = None
    op: str | None = None
    literal: object = None
    query: str | None = None


@dataclass
class Query:
    nodes: list[PatternNode]
    relations: list[str]
    where: list[tuple[str | None, Condition]]  # (connective before term, term)
    items: list[str]  # "var" or "var.prop"
    limit: int | None = None


class _Parser:
    def __init__(self, text: str):
        self.tokens = _lex(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self, kind: str | None = None, value: str | None = None) -> Token:
        tok = self.tokens[self.i]
        if kind and tok.kind != kind or value is not None and tok.value != value:
            expected = value or kind
            raise QueryParseError(f"expected {expected}, found {tok.value or 'end of query'}",
                                  tok.pos)
        self.i += 1
        return tok

    def parse(self) -> Query:
        self.take("ident", "MATCH")
        nodes = [self.parse_node()]
        relations = []
        while self.peek().kind == "lbracket":
            self.take("lbracket")
            relations.append(self.take("ident").value)
            self.take("arrow")
            nodes.append(self.parse_node())
        where: list[tuple[str | None, Condition]] = []
        if self.peek().kind == "ident" and self.peek().value == "WHERE":
            self.take("ident", "WHERE")
            where.append((None, self.parse_term()))
            while self.peek().kind == "ident" and self.peek().value in ("AND", "OR"):
                conn = self.take("ident").value
                where.append((conn, self.parse_term()))
        self.take("ident", "RETURN")
        items = [self.parse_item()]
        while self.peek().kind == "sym" and self.peek().value == ",":
            self.take("sym", ",")
            items.append(self.parse_item())
        limit = None
        if self.peek().kind == "ident" and self.peek().value == "LIMIT":
            self.take("ident", "LIMIT")
            tok = self.take("number")
            limit = int(tok.value)
        self.take("eof")
        return Query(nodes, relations, where, items, limit)

    def parse_node(self) -> PatternNode:
        self.take("sym", "(")
        var = self._ident("variable name")
        label = None
        if self.peek().kind == "sym" and self.peek().value == ":":
            self.take("sym", ":")
            label = self._ident("label")
        self.take("sym", ")")
        return PatternNode(var, label)

    def _ident(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "ident" or tok.value in KEYWORDS:
            raise QueryParseError(f"expected {what}, found {tok.value or 'end of query'}",
                                  tok.pos)
        return self.take("ident").value

    def parse_term(self) -> Condition:
        tok = self.peek()
        if tok.kind == "ident" and tok.value == "TEXT":
            self.take("ident", "TEXT")
            self.take("sym", "(")
            var = self._ident("variable name")
            self.take("sym", ",")
            qtok = self.take("string")
            self.take("sym", ")")
            return Condition("text", var, query=_unquote(qtok.value))
        var = self._ident("variable name")
        self.take("sym", ".")
        prop = self._ident("property name")
        op_tok = self.peek()
        if op_tok.kind == "sym" and op_tok.value == "=":
            self.take("sym", "=")
            op = "="
        elif op_tok.kind == "neq":
            self.take("neq")
            op = "<>"
        elif op_tok.kind == "ident" and op_tok.value == "CONTAINS":
            self.take("ident", "CONTAINS")
            op = "CONTAINS"
        else:
            raise QueryParseError(
                f"expected =, <> or CONTAINS, found {op_tok.value or 'end of query'}",
                op_tok.pos)
        lit_tok = self.peek()
        if lit_tok.kind == "string":
            literal: object = _unquote(self.take("string").value)
        elif lit_tok.kind == "number":
            raw = self.take("number").value
            literal = float(raw) if "." in raw else int(raw)
        else:
            raise QueryParseError(
                f"expected literal, found {lit_tok.value or 'end of query'}", lit_tok.pos)
        return Condition("prop", var, prop=prop, op=op, literal=literal)

    def parse_item(self) -> str:
        var = self._ident("variable name")
        if self.peek().kind == "sym" and self.peek().value == ".":
            self.take("sym", ".")
            prop = self._ident("property name")
            return f"{var}.{prop}"
        return var


def _unquote(raw: str) -> str:
    body = raw[1:-1]
    return body.replace('\\"', '"').replace("\\\\", "\\")


def parse_query(text: str) -> Query:
    return _Parser(text).parse()


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list]

    def to_json(self) -> dict:
        return {"columns": self.columns, "rows": self.rows}


def _node_value(node: Node) -> dict:
    return {"id": node.node_id, "label": node.label, "properties": node.properties}


def run_query(graph: KnowledgeGraph, text: str) -> ResultTable:
    """Execute a mini query: MATCH bindings, WHERE filter, RETURN projection."""
    query = parse_query(text)

    for pn in query.nodes:
        if pn.label is not None and not graph.nodes_by_label(pn.label):
            log.warning("unknown label in query: %s", pn.label)
    known_vars = {pn.var for pn in query.nodes}
    for _, cond in query.where:
        if cond.var not in known_vars:
            raise QueryParseError(f"unknown variable {cond.var} in WHERE", 0)
    for item in query.items:
        if item.split(".")[0] not in known_vars:
            raise QueryParseError(f"unknown variable {item.split('.')[0]} in RETURN", 0)

    # enumerate pattern bindings label-first
    first = query.nodes[0]
    candidates = (graph.nodes_by_label(first.label) if first.label else graph.nodes)
    bindings: list[list[Node]] = [[n] for n in candidates]
    for hop, rel in enumerate(query.relations):
        target = query.nodes[hop + 1]
        extended: list[list[Node]] = []
        for binding in bindings:
            for nid in graph.out_neighbors(binding[-1].node_id, rel):
                node = graph.node(nid)
                if target.label is None or node.label == target.label:
                    extended.append(binding + [node])
        bindings = extended

    text_matches: dict[str, set[int]] = {}
    for _, cond in query.where:
        if cond.kind == "text" and cond.query not in text_matches:
            ids: set[int] = set()
            for line, parent, _ in text_search(graph, cond.query, limit=None):
                ids.add(line.node_id)
                ids.add(parent.node_id)
            text_matches[cond.query] = ids

    def eval_cond(binding: list[Node]) -> bool:
        env = {pn.var: node for pn, node in zip(query.nodes, binding)}
        result: bool | None = None
        for conn, cond in query.where:
            node = env[cond.var]
            if cond.kind == "text":
                value = node.node_id in text_matches[cond.query]
            else:
                actual = node.properties.get(cond.prop)
                if cond.op == "=":
                    value = actual == cond.literal
                elif cond.op == "<>":
                    value = actual != cond.literal
                else:  # CONTAINS
                    value = isinstance(actual, str) and str(cond.literal) in actual
            if result is None:
                result = value
            elif conn == "AND":
                result = result and value
            else:
                result = result or value
        return True if result is None else result

    rows = []
    for binding in sorted(bindings, key=lambda b: [n.node_id for n in b]):
        if not eval_cond(binding):
            continue
        env = {pn.var: node for pn, node in zip(query.nodes, binding)}
        row = []
        for item in query.items:
            if "." in item:
                var, prop = item.split(".", 1)
                row.append(env[var].properties.get(prop))
            else:
                row.append(_node_value(env[item]))
        rows.append(row)
    if query.limit is not None:
        rows = rows[:query.limit]
    return ResultTable(list(query.items), rows)

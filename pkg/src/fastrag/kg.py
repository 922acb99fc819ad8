"""Embedded labeled-property graph with a text index over Line nodes."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .extraction import EntityRecord
from .sampling import tokenize
from .textsearch import TextIndex

log = logging.getLogger(__name__)

LINE_LABEL = "Line"
HAS_CHILD = "HAS_CHILD"
HAS_LINE = "HAS_LINE"


@dataclass
class Node:
    node_id: int
    label: str
    properties: dict


@dataclass
class Edge:
    from_id: int
    to_id: int
    relation: str


@dataclass
class GraphSchemaSummary:
    labels: dict[str, dict[str, str]]  # label -> {property: type name}
    relations: list[tuple[str, str, str]]  # (relation, from label, to label)

    def to_text(self) -> str:
        lines = []
        for label in sorted(self.labels):
            props = ", ".join(f"{p}: {t}" for p, t in sorted(self.labels[label].items()))
            lines.append(f"(:{label} {{{props}}})")
        for rel, src, dst in self.relations:
            lines.append(f"(:{src})-[{rel}]->(:{dst})")
        return "\n".join(lines)


class KnowledgeGraph:
    """Immutable after build; queries and text search need no coordination."""

    def __init__(self, nodes: list[Node], edges: list[Edge]):
        self.nodes = nodes
        self.edges = edges
        self._by_id = {n.node_id: n for n in nodes}
        self._by_label: dict[str, list[Node]] = {}
        for n in nodes:
            self._by_label.setdefault(n.label, []).append(n)
        self._out: dict[tuple[int, str], list[int]] = {}
        self._in: dict[tuple[int, str], list[int]] = {}
        for e in edges:
            self._out.setdefault((e.from_id, e.relation), []).append(e.to_id)
            self._in.setdefault((e.to_id, e.relation), []).append(e.from_id)
        self._text_index: TextIndex | None = None

    def node(self, node_id: int) -> Node:
        return self._by_id[node_id]

    def nodes_by_label(self, label: str) -> list[Node]:
        return self._by_label.get(label, [])

    def out_neighbors(self, node_id: int, relation: str) -> list[int]:
        return self._out.get((node_id, relation), [])

    def in_neighbors(self, node_id: int, relation: str) -> list[int]:
        return self._in.get((node_id, relation), [])

    def line_parent(self, line_id: int) -> Node:
        return self._by_id[self._in[(line_id, HAS_LINE)][0]]

    @property
    def text_index(self) -> TextIndex:
        if self._text_index is None:
            docs = [(n.node_id, tokenize(n.properties.get("text", "")))
                    for n in self.nodes_by_label(LINE_LABEL)]
            self._text_index = TextIndex(docs)
        return self._text_index

    def to_json(self) -> dict:
        return {
            "nodes": [{"node_id": n.node_id, "label": n.label,
                       "properties": n.properties} for n in self.nodes],
            "edges": [{"from_id": e.from_id, "to_id": e.to_id,
                       "relation": e.relation} for e in self.edges],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeGraph":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        nodes = [Node(n["node_id"], n["label"], n["properties"]) for n in data["nodes"]]
        edges = [Edge(e["from_id"], e["to_id"], e["relation"]) for e in data["edges"]]
        return cls(nodes, edges)


def _is_scalar(value) -> bool:
    return value is None or isinstance(value, (str, int, float, bool))


class _Builder:
    def __init__(self):
        self.nodes: list[Node] = []
        self.edges: list[Edge] = []
        self._next = 0

    def add_node(self, label: str, properties: dict) -> int:
        nid = self._next
        self._next += 1
        self.nodes.append(Node(nid, label, properties))
        return nid

    def add_object(self, label: str, obj: dict, parent: int | None = None) -> int:
        scalars = {}
        children: list[tuple[str, dict]] = []
        for name, value in obj.items():
            if isinstance(value, dict):
                children.append((name, value))
            elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
                children.extend((name, v) for v in value)
            elif _is_scalar(value) or isinstance(value, list):
                scalars[name] = value
        nid = self.add_node(label, scalars)
        if parent is not None:
            self.edges.append(Edge(parent, nid, HAS_CHILD))
        for name, child in children:
            self.add_object(name, child, parent=nid)
        return nid


def build_graph(entities: list[EntityRecord]) -> KnowledgeGraph:
    """One node per entity; object-valued properties become HAS_CHILD children;
    each distinct input line becomes a Line node behind HAS_LINE."""
    b = _Builder()
    for entity in entities:
        nid = b.add_object(entity.entity_type, entity.properties)
        seen: set[str] = set()
        for line in entity.input_data:
            if line in seen:
                continue
            seen.add(line)
            line_id = b.add_node(LINE_LABEL, {"text": line})
            b.edges.append(Edge(nid, line_id, HAS_LINE))
    return KnowledgeGraph(b.nodes, b.edges)


def export_schema(graph: KnowledgeGraph) -> GraphSchemaSummary:
    labels: dict[str, dict[str, str]] = {}
    for node in graph.nodes:
        props = labels.setdefault(node.label, {})
        for name, value in node.properties.items():
            props[name] = type(value).__name__ if value is not None else props.get(name, "NoneType")
    relations = sorted({
        (e.relation, graph.node(e.from_id).label, graph.node(e.to_id).label)
        for e in graph.edges})
    return GraphSchemaSummary({k: labels[k] for k in sorted(labels)}, relations)


def text_search(graph: KnowledgeGraph, query: str,
                limit: int | None = 10) -> list[tuple[Node, Node, float]]:
    """Ranked (line node, parent entity node, BM25 score) triples."""
    hits = graph.text_index.search(query, limit)
    return [(graph.node(h.doc_key), graph.line_parent(h.doc_key), h.score)
            for h in hits]

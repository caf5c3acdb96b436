"""Labeled simple graphs, union graphs, and the GML-style text format.

Vertices are indexed ``0..n-1`` in file order. Graphs are immutable; the
adjacency structure is built once at construction and shared freely.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class GraphError(Exception):
    pass


class ParseError(GraphError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class InvalidGraph(GraphError):
    pass


class NotConnected(GraphError):
    pass


class EmptyUnion(GraphError):
    pass


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class LabeledGraph:
    """A finite labeled simple graph.

    ``labels[i]`` is the label of vertex ``i``; ``edges`` maps the sorted
    endpoint pair to the edge label.
    """

    __slots__ = ("labels", "edges", "name", "adj", "_hash", "_canon")

    def __init__(self, labels: Sequence[str], edges: Iterable[tuple[int, int, str]] = (),
                 name: str | None = None):
        self.labels = tuple(labels)
        n = len(self.labels)
        emap: dict[tuple[int, int], str] = {}
        adj: list[dict[int, str]] = [{} for _ in range(n)]
        for u, v, lab in edges:
            if u == v:
                raise InvalidGraph(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraph(f"edge ({u}, {v}) references a missing vertex")
            key = _edge_key(u, v)
            if key in emap:
                raise InvalidGraph(f"parallel edge between {u} and {v}")
            emap[key] = lab
            adj[u][v] = lab
            adj[v][u] = lab
        self.edges = emap
        self.adj = tuple(adj)
        self.name = name
        self._hash = None
        self._canon = None

    @property
    def order(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def edge_label(self, u: int, v: int) -> str | None:
        return self.adj[u].get(v)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edge_list(self) -> list[tuple[int, int, str]]:
        return [(u, v, lab) for (u, v), lab in sorted(self.edges.items())]

    def relabel(self, perm: Sequence[int]) -> "LabeledGraph":
        """Return the graph with vertex ``v`` moved to position ``perm[v]``."""
        labels = [""] * len(self.labels)
        for v, lab in enumerate(self.labels):
            labels[perm[v]] = lab
        return LabeledGraph(labels, ((perm[u], perm[v], lab) for (u, v), lab in self.edges.items()),
                            self.name)

    def is_connected(self) -> bool:
        if not self.labels:
            return True
        return len(_bfs(self, 0)) == len(self.labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self.labels == other.labels and self.edges == other.edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.labels, frozenset(self.edges.items())))
        return self._hash

    def __repr__(self) -> str:
        name = f" {self.name!r}" if self.name else ""
        return f"<LabeledGraph{name} |V|={len(self.labels)} |E|={len(self.edges)}>"


def _bfs(g: LabeledGraph, start: int) -> list[int]:
    seen = {start}
    order = [start]
    for v in order:
        for u in g.adj[v]:
            if u not in seen:
                seen.add(u)
                order.append(u)
    return order


def induced_subgraph(g: LabeledGraph, vertices: Sequence[int], name: str | None = None) -> LabeledGraph:
    """Subgraph on ``vertices``, renumbered in the given order."""
    pos = {v: i for i, v in enumerate(vertices)}
    edges = []
    for v in vertices:
        for u, lab in g.adj[v].items():
            if u in pos and v < u:
                edges.append((pos[v], pos[u], lab))
    return LabeledGraph([g.labels[v] for v in vertices], edges, name)


@dataclass(frozen=True)
class UnionGraph:
    """An ordered vector of connected graphs denoting their disjoint union.

    Global vertices are numbered component by component. ``origin``, when
    present, records for each global vertex the index it had in the graph
    the union was split from.
    """

    components: tuple[LabeledGraph, ...] = ()
    origin: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        for c in self.components:
            if not c.is_connected() or len(c) == 0:
                raise NotConnected("union graph components must be non-empty and connected")

    def __len__(self) -> int:
        return len(self.components)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, total = [], 0
        for c in self.components:
            out.append(total)
            total += len(c)
        return tuple(out)

    @property
    def vertex_count(self) -> int:
        return sum(len(c) for c in self.components)

    def gamma(self, v: int) -> tuple[int, int]:
        """Global vertex -> (component index, local vertex)."""
        for i, c in enumerate(self.components):
            if v < len(c):
                return i, v
            v -= len(c)
        raise IndexError("vertex out of range")

    def global_index(self, comp: int, local: int) -> int:
        return self.offsets[comp] + local

    def extend(self, g: LabeledGraph) -> "UnionGraph":
        if len(g) == 0 or not g.is_connected():
            raise NotConnected("only connected graphs can extend a union graph")
        return UnionGraph(self.components + (g,))

    def pop(self) -> "UnionGraph":
        if not self.components:
            raise EmptyUnion("cannot pop from an empty union graph")
        return UnionGraph(self.components[:-1])

    def flatten(self) -> LabeledGraph:
        return disjoint_union(self.components)


def extend(u: UnionGraph, g: LabeledGraph) -> UnionGraph:
    return u.extend(g)


def pop(u: UnionGraph) -> UnionGraph:
    return u.pop()


def disjoint_union(graphs: Iterable[LabeledGraph]) -> LabeledGraph:
    labels: list[str] = []
    edges = []
    for g in graphs:
        off = len(labels)
        labels.extend(g.labels)
        edges.extend((u + off, v + off, lab) for (u, v), lab in g.edges.items())
    return LabeledGraph(labels, edges)


def connected_components(g: LabeledGraph) -> UnionGraph:
    """Split ``g`` into its components, ordered by smallest vertex index."""
    seen: set[int] = set()
    comps = []
    origin: list[int] = []
    for v in range(len(g)):
        if v in seen:
            continue
        members = sorted(_bfs(g, v))
        seen.update(members)
        comps.append(induced_subgraph(g, members))
        origin.extend(members)
    return UnionGraph(tuple(comps), tuple(origin))


# --- text format -----------------------------------------------------------

_TOKEN = re.compile(r'\s+|#[^\n]*|(?P<str>"(?:[^"\\]|\\.)*")|(?P<word>[A-Za-z_][A-Za-z0-9_]*)'
                    r'|(?P<int>-?\d+)|(?P<punct>[\[\]])|(?P<bad>.)')


@dataclass
class _Tok:
    kind: str
    value: object
    line: int


def tokenize(text: str) -> list[_Tok]:
    toks = []
    line = 1
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        raw = m.group(0)
        if kind == "str":
            toks.append(_Tok("str", _unescape(raw[1:-1]), line))
        elif kind == "word":
            toks.append(_Tok("word", raw, line))
        elif kind == "int":
            toks.append(_Tok("int", int(raw), line))
        elif kind == "punct":
            toks.append(_Tok(raw, raw, line))
        elif kind == "bad":
            raise ParseError(line, f"unexpected character {raw!r}")
        line += raw.count("\n")
    return toks


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), s)


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")


class TokenStream:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def line(self) -> int:
        if self.pos < len(self.toks):
            return self.toks[self.pos].line
        return self.toks[-1].line if self.toks else 1

    def peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self, kind: str, what: str | None = None) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise ParseError(self.line, f"unexpected end of input, expected {what or kind}")
        if tok.kind != kind or (what is not None and tok.value != what):
            raise ParseError(tok.line, f"expected {what or kind}, got {tok.value!r}")
        self.pos += 1
        return tok

    def keyword(self, word: str) -> None:
        self.next("word", word)

    def nonneg_int(self) -> int:
        tok = self.next("int")
        if tok.value < 0:
            raise ParseError(tok.line, "ids must be nonnegative")
        return tok.value

    def at_end(self) -> bool:
        return self.pos >= len(self.toks)


@dataclass
class RawItem:
    """A parsed ``node`` or ``edge`` item before index assignment."""

    kind: str  # "node" | "edge"
    ids: tuple[int, ...]
    label: str
    line: int


def parse_items(ts: TokenStream) -> list[RawItem]:
    """Parse ``item*`` up to (not including) the closing bracket."""
    items = []
    while True:
        tok = ts.peek()
        if tok is None or tok.kind == "]":
            return items
        if tok.kind != "word" or tok.value not in ("node", "edge"):
            raise ParseError(tok.line, f"expected node or edge, got {tok.value!r}")
        ts.pos += 1
        ts.next("[")
        if tok.value == "node":
            ts.keyword("id")
            ids: tuple[int, ...] = (ts.nonneg_int(),)
        else:
            ts.keyword("source")
            s = ts.nonneg_int()
            ts.keyword("target")
            ids = (s, ts.nonneg_int())
        ts.keyword("label")
        label = ts.next("str").value
        ts.next("]")
        items.append(RawItem(tok.value, ids, label, tok.line))


def parse_graph(text: str, name: str | None = None) -> LabeledGraph:
    ts = TokenStream(text)
    ts.keyword("graph")
    ts.next("[")
    items = parse_items(ts)
    ts.next("]")
    if not ts.at_end():
        raise ParseError(ts.line, "trailing input after graph")
    index: dict[int, int] = {}
    labels: list[str] = []
    edges = []
    for it in items:
        if it.kind == "node":
            if it.ids[0] in index:
                raise InvalidGraph(f"duplicate node id {it.ids[0]}")
            index[it.ids[0]] = len(labels)
            labels.append(it.label)
    for it in items:
        if it.kind == "edge":
            s, t = it.ids
            if s not in index or t not in index:
                raise InvalidGraph(f"edge {s}-{t} references an unknown node id")
            edges.append((index[s], index[t], it.label))
    return LabeledGraph(labels, edges, name)


def render_graph(g: LabeledGraph) -> str:
    lines = ["graph ["]
    for v, lab in enumerate(g.labels):
        lines.append(f'  node [ id {v} label "{_escape(lab)}" ]')
    for u, v, lab in g.edge_list():
        lines.append(f'  edge [ source {u} target {v} label "{_escape(lab)}" ]')
    lines.append("]")
    return "\n".join(lines) + "\n"


def read_graph(path) -> LabeledGraph:
    from pathlib import Path

    p = Path(path)
    return parse_graph(p.read_text(encoding="utf-8"), name=p.stem)

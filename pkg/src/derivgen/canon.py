"""Canonical forms, isomorphism tests and automorphism generators.

Individualization-refinement: equitable refinement by neighbour counts,
target cell is the first smallest non-singleton cell, the canonical leaf is
the one with the lexicographically least certificate. Leaves with equal
certificates yield automorphisms; these prune the search tree (orbit pruning
at every node, jump-back to the common ancestor) and, by construction,
generate the full automorphism group.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .graph import LabeledGraph
from .perm import Perm, compose, inverse

CanonicalCode = bytes

_WEIGHT_BITS = 12


@dataclass(frozen=True)
class Canon:
    code: CanonicalCode
    generators: tuple[Perm, ...]
    labeling: tuple[int, ...]  # labeling[v] = canonical position of vertex v

    @property
    def hex(self) -> str:
        return self.code.hex()


class _Search:
    def __init__(self, g: LabeledGraph):
        self.n = n = len(g)
        vlabels = sorted(set(g.labels))
        elabels = sorted(set(g.edges.values()))
        self.vtable = vlabels
        self.etable = elabels
        eid = {lab: i for i, lab in enumerate(elabels)}
        self.adj = [[(u, 1 << (_WEIGHT_BITS * eid[lab])) for u, lab in g.adj[v].items()] for v in range(n)]
        self.edges = [(u, v, eid[lab]) for (u, v), lab in g.edges.items()]
        vid = {lab: i for i, lab in enumerate(vlabels)}
        self.vlabel = [vid[lab] for lab in g.labels]
        self.gens: list[Perm] = []
        self.first: tuple[tuple, list[int], list[int]] | None = None  # (cert, perm, seq)
        self.best: tuple[tuple, list[int], list[int]] | None = None

    # --- partitions -----------------------------------------------------
    def initial(self):
        color = [0] * self.n
        cells: dict[int, list[int]] = {}
        groups: dict[int, list[int]] = {}
        for v, c in enumerate(self.vlabel):
            groups.setdefault(c, []).append(v)
        start = 0
        for c in sorted(groups):
            members = groups[c]
            cells[start] = members
            for v in members:
                color[v] = start
            start += len(members)
        return color, cells, sorted(cells)

    def refine(self, color: list[int], cells: dict[int, list[int]], queue: list[int]) -> None:
        adj = self.adj
        inq = set(queue)
        qi = 0
        while qi < len(queue):
            w = queue[qi]
            qi += 1
            inq.discard(w)
            cnt: dict[int, int] = {}
            for v in cells[w]:
                for u, wt in adj[v]:
                    cnt[u] = cnt.get(u, 0) + wt
            touched: dict[int, list[int]] = {}
            for u in cnt:
                cu = color[u]
                if len(cells[cu]) > 1:
                    touched.setdefault(cu, []).append(u)
            for s in sorted(touched):
                cell = cells[s]
                hit = touched[s]
                if len(hit) == len(cell):
                    k0 = cnt[hit[0]]
                    if all(cnt[u] == k0 for u in hit):
                        continue
                byk: dict[int, list[int]] = {}
                for u in cell:
                    byk.setdefault(cnt.get(u, 0), []).append(u)
                if len(byk) == 1:
                    continue
                keys = sorted(byk)
                frags = [byk[k] for k in keys]
                was_queued = s in inq
                pos = s
                starts = []
                for f in frags:
                    cells[pos] = f
                    for u in f:
                        color[u] = pos
                    starts.append(pos)
                    pos += len(f)
                if was_queued:
                    add = starts[1:]
                else:
                    big = max(range(len(frags)), key=lambda i: (len(frags[i]), -i))
                    add = [st for i, st in enumerate(starts) if i != big]
                for st in add:
                    if st not in inq:
                        inq.add(st)
                        queue.append(st)

    def certificate(self, color: list[int]) -> tuple:
        out = []
        for u, v, e in self.edges:
            a, b = color[u], color[v]
            out.append((a, b, e) if a < b else (b, a, e))
        out.sort()
        return tuple(out)

    # --- search ---------------------------------------------------------
    def run(self) -> None:
        color, cells, queue = self.initial()
        self.refine(color, cells, queue)
        self.node(color, cells, [])

    def node(self, color: list[int], cells: dict[int, list[int]], seq: list[int]) -> int | None:
        target = None
        for s in sorted(cells):
            size = len(cells[s])
            if size > 1 and (target is None or size < len(cells[target])):
                target = s
                if size == 2:
                    break
        if target is None:
            return self.leaf(color, seq)
        depth = len(seq)
        explored: list[int] = []
        for v in sorted(cells[target]):
            if explored and self.pruned(v, explored, seq):
                continue
            c2 = color[:]
            cells2 = dict(cells)
            rest = [u for u in cells2[target] if u != v]
            cells2[target] = [v]
            cells2[target + 1] = rest
            for u in rest:
                c2[u] = target + 1
            self.refine(c2, cells2, [target])
            explored.append(v)
            jump = self.node(c2, cells2, seq + [v])
            if jump is not None and jump < depth:
                return jump
        return None

    def pruned(self, v: int, explored: list[int], seq: list[int]) -> bool:
        fixing = [g for g in self.gens if all(g[x] == x for x in seq)]
        if not fixing:
            return False
        seen = {v}
        stack = [v]
        targets = set(explored)
        while stack:
            x = stack.pop()
            if x in targets:
                return True
            for g in fixing:
                y = g[x]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    def leaf(self, color: list[int], seq: list[int]) -> int | None:
        cert = self.certificate(color)
        if self.first is None:
            self.first = self.best = (cert, color, seq)
            return None
        for ref in (self.first, self.best):
            if cert == ref[0]:
                # ref vertex at position k -> this vertex at position k
                inv_this = inverse(tuple(color))
                auto = compose(inv_this, tuple(ref[1]))
                if auto not in self.gens and any(i != x for i, x in enumerate(auto)):
                    self.gens.append(auto)
                c = 0
                while c < len(seq) and c < len(ref[2]) and seq[c] == ref[2][c]:
                    c += 1
                return c
        if cert < self.best[0]:
            self.best = (cert, color, seq)
        return None


def _code(s: _Search, labeling: Sequence[int], cert: tuple) -> CanonicalCode:
    order = [0] * s.n
    for v, p in enumerate(labeling):
        order[p] = v
    payload = [s.n, s.vtable, [s.vlabel[v] for v in order], [list(e) for e in cert], s.etable]
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def canonical_form(g: LabeledGraph) -> Canon:
    cached = getattr(g, "_canon", None)
    if cached is not None:
        return cached
    s = _Search(g)
    if s.n == 0:
        result = Canon(_code(s, [], ()), (), ())
    else:
        s.run()
        cert, color, _ = s.best
        result = Canon(_code(s, color, cert), tuple(s.gens), tuple(color))
    try:
        g._canon = result
    except AttributeError:
        pass
    return result


def canonicalize(g: LabeledGraph) -> tuple[CanonicalCode, tuple[Perm, ...]]:
    c = canonical_form(g)
    return c.code, c.generators


def canonical_code(g: LabeledGraph) -> CanonicalCode:
    return canonical_form(g).code


def canonical_graph(g: LabeledGraph) -> LabeledGraph:
    """The graph renumbered into canonical order."""
    c = canonical_form(g)
    out = g.relabel(c.labeling)
    out.name = g.name
    return out


def is_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    if len(g1) != len(g2) or len(g1.edges) != len(g2.edges):
        return False
    if sorted(g1.labels) != sorted(g2.labels):
        return False
    return canonical_code(g1) == canonical_code(g2)


def isomorphism(g1: LabeledGraph, g2: LabeledGraph) -> tuple[int, ...] | None:
    """A vertex bijection g1 -> g2, or None."""
    if not is_isomorphic(g1, g2):
        return None
    l1 = canonical_form(g1).labeling
    l2 = canonical_form(g2).labeling
    return compose(inverse(l2), l1)


def derivation_encoding(rule, host: LabeledGraph, match: Sequence[int]) -> LabeledGraph:
    """Colored graph of L, K, R and the host, with l-, r- and m-arrows."""
    from .rule import rule_encoding

    enc, _, _ = rule_encoding(rule)
    off = len(enc)
    labels = list(enc.labels) + [f"G|{x}" for x in host.labels]
    edges = [(a, b, lab) for (a, b), lab in enc.edges.items()]
    edges += [(off + a, off + b, f"e|{lab}") for (a, b), lab in host.edges.items()]
    edges += [(v, off + match[v], "m") for v in range(len(rule.L))]
    return LabeledGraph(labels, edges)


def encode_derivation(rule, host: LabeledGraph, match: Sequence[int]) -> CanonicalCode:
    """Canonical code of a derivation; equal exactly for isomorphic derivations."""
    return canonical_code(derivation_encoding(rule, host, match))

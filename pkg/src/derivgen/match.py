"""Subgraph monomorphism search and the per-component match database."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .canon import canonical_code
from .graph import GraphError, LabeledGraph
from .rule import Rule, RuleAutInfo, component_valid


class DuplicateIsomorphicInput(GraphError):
    pass


def _expansion_order(pattern: LabeledGraph, host: LabeledGraph) -> list[tuple[int, int | None]]:
    """Pattern vertices in a connected order, each with an already placed neighbour."""
    n = len(pattern)
    freq: dict[str, int] = {}
    for lab in host.labels:
        freq[lab] = freq.get(lab, 0) + 1
    placed = [False] * n
    order: list[tuple[int, int | None]] = []
    while len(order) < n:
        root = min((v for v in range(n) if not placed[v]),
                   key=lambda v: (freq.get(pattern.labels[v], 0), -pattern.degree(v), v))
        placed[root] = True
        order.append((root, None))
        frontier = [root]
        for v in frontier:
            for u in sorted(pattern.adj[v], key=lambda u: (-pattern.degree(u), u)):
                if not placed[u]:
                    placed[u] = True
                    order.append((u, v))
                    frontier.append(u)
    return order


def enumerate_monomorphisms(pattern: LabeledGraph, host: LabeledGraph) -> list[tuple[int, ...]]:
    """All injective label- and edge-preserving maps, sorted by image vector."""
    n = len(pattern)
    if n == 0:
        return [()]
    if n > len(host):
        return []
    order = _expansion_order(pattern, host)
    # edges from each pattern vertex back to vertices placed before it
    pos = {v: i for i, (v, _) in enumerate(order)}
    back = [[(u, lab) for u, lab in pattern.adj[v].items() if pos[u] < pos[v]] for v, _ in order]
    plabels = pattern.labels
    hlabels = host.labels
    hadj = host.adj
    pdeg = [pattern.degree(v) for v in range(n)]
    image = [-1] * n
    used = [False] * len(host)
    out: list[tuple[int, ...]] = []

    def rec(t: int) -> None:
        if t == n:
            out.append(tuple(image))
            return
        v, parent = order[t]
        if parent is None:
            cands = range(len(host))
        else:
            cands = hadj[image[parent]]
        lab = plabels[v]
        for c in cands:
            if used[c] or hlabels[c] != lab or len(hadj[c]) < pdeg[v]:
                continue
            adj_c = hadj[c]
            ok = True
            for u, elab in back[t]:
                if adj_c.get(image[u]) != elab:
                    ok = False
                    break
            if not ok:
                continue
            image[v] = c
            used[c] = True
            rec(t + 1)
            used[c] = False
        image[v] = -1

    rec(0)
    out.sort()
    return out


@dataclass(frozen=True)
class Entry:
    """A monomorphism ``phi: L_i -> graphs[graph]`` with its comparison key."""

    graph: int
    phi: tuple[int, ...]
    vec: tuple[int, ...]  # phi read through the class representative isomorphism
    mask: int  # bitmask of image vertices


@dataclass
class MonoDatabase:
    graphs: tuple[LabeledGraph, ...]
    codes: tuple[bytes, ...]
    rank: tuple[int, ...]  # position of each graph in the graph order
    entries: tuple[tuple[Entry, ...], ...]
    raw_counts: tuple[int, ...]

    @property
    def empty(self) -> bool:
        """Some component has no candidate monomorphism, so nothing can be derived."""
        return any(len(e) == 0 for e in self.entries)


def normalized(phi: Sequence[int], rho: Sequence[int]) -> tuple[int, ...]:
    return tuple(phi[x] for x in rho)


def locally_minimal(phi: Sequence[int], rho: Sequence[int], local: Sequence[Sequence[int]]) -> bool:
    """No local rule automorphism gives a smaller normalized image vector."""
    vec = normalized(phi, rho)
    for a in local:
        if tuple(phi[a[x]] for x in rho) < vec:
            return False
    return True


def graph_codes(graphs: Sequence[LabeledGraph]) -> tuple[tuple[bytes, ...], tuple[int, ...]]:
    codes = tuple(canonical_code(g) for g in graphs)
    seen: dict[bytes, int] = {}
    for i, c in enumerate(codes):
        if c in seen:
            raise DuplicateIsomorphicInput(f"input graphs {seen[c]} and {i} are isomorphic")
        seen[c] = i
    by_code = sorted(range(len(graphs)), key=lambda i: codes[i])
    rank = [0] * len(graphs)
    for r, i in enumerate(by_code):
        rank[i] = r
    return codes, tuple(rank)


def build_database(rule: Rule, graphs: Sequence[LabeledGraph], prefilter: bool = False,
                   info: RuleAutInfo | None = None, codes=None) -> MonoDatabase:
    """Valid monomorphisms of each left component into each input graph.

    With ``prefilter`` only those minimal under the local rule automorphisms
    (and the identity host automorphism) are kept.
    """
    graphs = tuple(graphs)
    if codes is None:
        codes, rank = graph_codes(graphs)
    else:
        codes, rank = codes
    if info is None:
        info = rule.aut_info()
    entries = []
    raw = []
    for i, comp in enumerate(rule.left.components):
        rho = info.rho[i]
        local = [a for a in info.local[i] if any(x != y for x, y in enumerate(a))]
        lst = []
        count = 0
        for gi, g in enumerate(graphs):
            for phi in enumerate_monomorphisms(comp, g):
                count += 1
                if not component_valid(rule, i, g, phi):
                    continue
                if prefilter and local and not locally_minimal(phi, rho, local):
                    continue
                mask = 0
                for v in phi:
                    mask |= 1 << v
                lst.append(Entry(gi, phi, normalized(phi, rho), mask))
        lst.sort(key=lambda e: (rank[e.graph], e.vec))
        entries.append(tuple(lst))
        raw.append(count)
    return MonoDatabase(graphs, codes, rank, tuple(entries), tuple(raw))

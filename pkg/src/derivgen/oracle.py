"""Brute-force reference enumeration for small instances.

Nothing here relies on the matcher, the canonicalizer or the validity
helpers of the engine: maps are found by plain backtracking, validity is
checked against the definitions directly and derivation isomorphism is
decided by exhaustive search over rule automorphisms and host isomorphisms.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .graph import GraphError, LabeledGraph, disjoint_union
from .rule import Rule


class BudgetExceeded(GraphError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_components_in_L: int = 3
    max_multiset_size: int = 3
    max_host_vertices: int = 24
    max_maps: int = 200_000

    def __post_init__(self):
        for name in ("max_components_in_L", "max_multiset_size", "max_host_vertices", "max_maps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class OracleDerivation:
    host_ids: tuple[int, ...]  # input graph of each host component
    host: LabeledGraph  # disjoint union in host_ids order
    sizes: tuple[int, ...]
    match: tuple[int, ...]  # L vertex -> host vertex

    def order_key(self) -> tuple:
        """Host reordered by first use along the left components; match per component."""
        offs = [0]
        for s in self.sizes:
            offs.append(offs[-1] + s)

        def comp(v):
            for c in range(len(self.sizes)):
                if v < offs[c + 1]:
                    return c, v - offs[c]
            raise IndexError(v)

        return self._key(comp)

    def _key(self, comp) -> tuple:
        rule = self._rule
        seen: dict[int, int] = {}
        slots = []
        for i in range(rule.k):
            vs = list(rule.component_vertices(i))
            c, _ = comp(self.match[vs[0]])
            if c not in seen:
                seen[c] = len(seen)
            slots.append((seen[c], tuple(comp(self.match[v])[1] for v in vs)))
        order = sorted(seen, key=seen.get)
        return (tuple(self.host_ids[c] for c in order), tuple(slots))

    _rule: Rule = field(default=None, repr=False)


@dataclass
class OracleResult:
    derivations: list[OracleDerivation]
    classes: list[list[int]]  # indices into derivations, one list per isomorphism class
    raw_matches: int = 0  # valid proper maps before host reordering is factored out

    @property
    def raw_derivations(self) -> list[tuple]:
        return [d.order_key() for d in self.derivations]

    @property
    def representatives(self) -> list[OracleDerivation]:
        return [self.derivations[c[0]] for c in self.classes]


# --- maps ---------------------------------------------------------------------

def all_monomorphisms(pattern: LabeledGraph, host: LabeledGraph, limit: int | None = None,
                      fixed: dict[int, int] | None = None, first: bool = False) -> list[tuple[int, ...]]:
    """Injective label- and edge-preserving maps, pattern vertices assigned in index order.

    With ``first`` the search stops at the first map found.
    """
    n = len(pattern)
    out: list[tuple[int, ...]] = []
    image = [-1] * n
    used = set()
    fixed = fixed or {}

    def rec(v: int) -> None:
        if limit is not None and len(out) > limit:
            raise BudgetExceeded("too many maps")
        if v == n:
            out.append(tuple(image))
            return
        cands = [fixed[v]] if v in fixed else range(len(host))
        for c in cands:
            if first and out:
                return
            if c in used or host.labels[c] != pattern.labels[v]:
                continue
            if any(host.edge_label(c, image[u]) != lab for u, lab in pattern.adj[v].items() if u < v):
                continue
            image[v] = c
            used.add(c)
            rec(v + 1)
            used.discard(c)
        image[v] = -1

    rec(0)
    return out


def brute_force_aut(g: LabeledGraph) -> set[tuple[int, ...]]:
    """All automorphisms by trying every vertex permutation."""
    n = len(g)
    if n > 9:
        raise BudgetExceeded("brute-force automorphisms limited to 9 vertices")
    out = set()
    for p in itertools.permutations(range(n)):
        if all(g.labels[v] == g.labels[p[v]] for v in range(n)) and \
                all(g.edge_label(p[a], p[b]) == lab for (a, b), lab in g.edges.items()):
            out.add(p)
    return out


def is_valid_total(rule: Rule, G: LabeledGraph, m: Sequence[int]) -> bool:
    """Dangling and parallel-edge conditions, straight from their statement."""
    l_image = set(rule.l)
    for u in range(len(rule.L)):
        if u in l_image:
            continue
        for v2 in G.adj[m[u]]:
            if not any(rule.L.has_edge(u, v) and m[v] == v2 for v in range(len(rule.L))):
                return False
    for a in range(len(rule.K)):
        for b in range(len(rule.K)):
            if a == b:
                continue
            la, lb = rule.l[a], rule.l[b]
            if not rule.L.has_edge(la, lb) and rule.R.has_edge(rule.r[a], rule.r[b]):
                if G.has_edge(m[la], m[lb]):
                    return False
    return True


def is_proper_total(sizes: Sequence[int], m: Sequence[int]) -> bool:
    hit = set()
    for v in m:
        total = 0
        for c, s in enumerate(sizes):
            if v < total + s:
                hit.add(c)
                break
            total += s
    return len(hit) == len(sizes)


def rule_automorphisms_bf(rule: Rule) -> list[tuple[int, ...]]:
    """L-parts of all rule automorphisms, by backtracking on L then R."""
    L, K, R = rule.L, rule.K, rule.R
    l_inv = {x: k for k, x in enumerate(rule.l)}
    r_inv = {x: k for k, x in enumerate(rule.r)}
    out = []
    for aL in all_monomorphisms(L, L):
        aK = []
        ok = True
        for k in range(len(K)):
            y = aL[rule.l[k]]
            if y not in l_inv:
                ok = False
                break
            aK.append(l_inv[y])
        if not ok:
            continue
        if any(K.labels[k] != K.labels[aK[k]] for k in range(len(K))):
            continue
        if any(K.edge_label(aK[a], aK[b]) != lab for (a, b), lab in K.edges.items()):
            continue
        if len(K.edges) != len({(min(aK[a], aK[b]), max(aK[a], aK[b])) for (a, b) in K.edges}):
            continue
        fixed = {rule.r[k]: rule.r[aK[k]] for k in range(len(K))}
        if any(R.labels[x] != R.labels[y] for x, y in fixed.items()):
            continue
        if all_monomorphisms(R, R, fixed=fixed, first=True):
            out.append(aL)
    return out


def host_isomorphic_under(G1: LabeledGraph, G2: LabeledGraph, fixed: dict[int, int]) -> bool:
    """Is there an isomorphism G1 -> G2 extending ``fixed``?"""
    if len(G1) != len(G2) or len(G1.edges) != len(G2.edges):
        return False
    if sorted(G1.labels) != sorted(G2.labels):
        return False
    return bool(all_monomorphisms(G1, G2, fixed=fixed, first=True))


def derivations_isomorphic(rule: Rule, auts: Sequence[Sequence[int]],
                           d1: OracleDerivation, d2: OracleDerivation) -> bool:
    if sorted(d1.host_ids) != sorted(d2.host_ids):
        return False
    for a in auts:
        fixed = {}
        ok = True
        for v in range(len(rule.L)):
            x, y = d1.match[v], d2.match[a[v]]
            if fixed.setdefault(x, y) != y:
                ok = False
                break
        if ok and host_isomorphic_under(d1.host, d2.host, fixed):
            return True
    return False


def brute_force_derivations(graphs: Sequence[LabeledGraph], rule: Rule,
                            budget: OracleBudget = OracleBudget()) -> OracleResult:
    """All proper derivations, and their partition into isomorphism classes."""
    k = rule.k
    if k > budget.max_components_in_L:
        raise BudgetExceeded("rule has too many left components")
    if k > budget.max_multiset_size:
        raise BudgetExceeded("multisets would exceed the size budget")
    derivs: list[OracleDerivation] = []
    maps = raw = 0
    for size in range(1, k + 1):
        for combo in itertools.combinations_with_replacement(range(len(graphs)), size):
            host = disjoint_union(graphs[i] for i in combo)
            if len(host) > budget.max_host_vertices:
                raise BudgetExceeded("host graph too large")
            sizes = tuple(len(graphs[i]) for i in combo)
            found = all_monomorphisms(rule.L, host, limit=budget.max_maps - maps)
            maps += len(found)
            seen = set()
            for m in found:
                if not is_proper_total(sizes, m) or not is_valid_total(rule, host, m):
                    continue
                raw += 1
                d = OracleDerivation(combo, host, sizes, m, rule)
                key = d.order_key()
                if key in seen:
                    continue  # same derivation up to reordering host components
                seen.add(key)
                derivs.append(d)
    auts = rule_automorphisms_bf(rule)
    classes: list[list[int]] = []
    for idx, d in enumerate(derivs):
        for c in classes:
            if derivations_isomorphic(rule, auts, derivs[c[0]], d):
                c.append(idx)
                break
        else:
            classes.append([idx])
    return OracleResult(derivs, classes, raw)

"""DPO rules: parsing, match validity, application and rule automorphisms.

A rule is a span ``L <-l- K -r-> R`` of monomorphisms. K carries the labels
it has in L; where R disagrees, the difference is a label override applied
to the matched host element. L and R are stored with their vertices grouped
component by component, so a vertex of component ``i`` with local index
``w`` has global index ``rule.offsets[i] + w``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .canon import CanonicalCode, canonical_form
from .graph import (GraphError, LabeledGraph, ParseError, TokenStream, UnionGraph,
                    _escape, connected_components, parse_items)
from .perm import DEFAULT_ELEMENT_CAP, Perm, build_group


class IllFormedRule(GraphError):
    pass


class InvalidMatch(GraphError):
    pass


# --- rule structure ----------------------------------------------------------

def _normalize(g: LabeledGraph) -> tuple[LabeledGraph, UnionGraph, tuple[int, ...]]:
    """Renumber ``g`` component by component; returns (graph, union, old->new)."""
    u = connected_components(g)
    new_of_old = [0] * len(g)
    for new, old in enumerate(u.origin or ()):
        new_of_old[old] = new
    flat = g.relabel(new_of_old) if len(g) else g
    return flat, UnionGraph(u.components), tuple(new_of_old)


class Rule:
    """A DPO rule ``L <- K -> R`` with label overrides.

    ``l[k]`` and ``r[k]`` give the L and R vertex of K vertex ``k``. ``ids``
    records the file id of every K, L and R vertex for rendering.
    """

    def __init__(self, name: str, L: LabeledGraph, K: LabeledGraph, R: LabeledGraph,
                 l: Sequence[int], r: Sequence[int], ids: dict | None = None):
        L, left, lmap = _normalize(L)
        R, right, rmap = _normalize(R)
        self.name = name
        self.L, self.K, self.R = L, K, R
        self.l = tuple(lmap[x] for x in l)
        self.r = tuple(rmap[x] for x in r)
        self.left = left
        self.right = right
        if ids is None:
            ids = {}
        self.ids = {
            "K": tuple(ids.get("K", range(len(K)))),
            "L": _permuted(ids.get("L"), lmap),
            "R": _permuted(ids.get("R"), rmap),
        }
        self._check()
        self._derive()
        self._aut: RuleAutInfo | None = None

    def _check(self) -> None:
        for name, f, tgt in (("l", self.l, self.L), ("r", self.r, self.R)):
            if len(f) != len(self.K) or len(set(f)) != len(f):
                raise IllFormedRule(f"{name} is not injective on K")
            for (a, b) in self.K.edges:
                if not tgt.has_edge(f[a], f[b]):
                    raise IllFormedRule(f"{name} does not preserve the K edge {a}-{b}")
        for k, x in enumerate(self.l):
            if self.L.labels[x] != self.K.labels[k]:
                raise IllFormedRule(f"K vertex {k} must carry its left label")
        for (a, b), lab in self.K.edges.items():
            if self.L.edge_label(self.l[a], self.l[b]) != lab:
                raise IllFormedRule(f"K edge {a}-{b} must carry its left label")

    def _derive(self) -> None:
        L = self.L
        self.offsets = self.left.offsets
        self.comp_of = tuple(i for i, c in enumerate(self.left.components) for _ in range(len(c)))
        k_of_l: list[int | None] = [None] * len(L)
        for k, x in enumerate(self.l):
            k_of_l[x] = k
        self.k_of_l = tuple(k_of_l)
        self.deleted = frozenset(x for x in range(len(L)) if k_of_l[x] is None)
        created = []
        for a in range(len(self.K)):
            for b in range(a + 1, len(self.K)):
                if not L.has_edge(self.l[a], self.l[b]) and self.R.has_edge(self.r[a], self.r[b]):
                    x, y = sorted((self.l[a], self.l[b]))
                    created.append((x, y))
        self.created_pairs = tuple(sorted(created))
        self.vertex_overrides = {k: (self.K.labels[k], self.R.labels[self.r[k]])
                                 for k in range(len(self.K))
                                 if self.K.labels[k] != self.R.labels[self.r[k]]}
        self.edge_overrides = {}
        for (a, b), lab in self.K.edges.items():
            rl = self.R.edge_label(self.r[a], self.r[b])
            if rl != lab:
                self.edge_overrides[(a, b)] = (lab, rl)

    @property
    def k(self) -> int:
        return len(self.left)

    def component_vertices(self, i: int) -> range:
        return range(self.offsets[i], self.offsets[i] + len(self.left.components[i]))

    def key(self):
        return (self.L, self.K, self.R, self.l, self.r)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Rule):
            return NotImplemented
        return self.name == other.name and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.name, self.L, self.K, self.R, self.l, self.r))

    def __repr__(self) -> str:
        return f"<Rule {self.name!r} |L|={len(self.L)} |K|={len(self.K)} |R|={len(self.R)} k={self.k}>"

    def aut_info(self) -> "RuleAutInfo":
        if self._aut is None:
            self._aut = compute_rule_aut(self)
        return self._aut


def _permuted(ids, new_of_old: Sequence[int]) -> tuple:
    if ids is None:
        return tuple(range(len(new_of_old)))
    out = [None] * len(new_of_old)
    for old, new in enumerate(new_of_old):
        out[new] = ids[old]
    return tuple(out)


def invert_rule(p: Rule) -> Rule:
    """Swap the left and right sides. K takes the right labels."""
    K = LabeledGraph([p.R.labels[x] for x in p.r],
                     ((a, b, p.R.edge_label(p.r[a], p.r[b])) for (a, b) in p.K.edges))
    return Rule(p.name, p.R, K, p.L, p.r, p.l,
                {"K": p.ids["K"], "L": p.ids["R"], "R": p.ids["L"]})


# --- text format -------------------------------------------------------------

def parse_rule(text: str, name: str | None = None) -> Rule:
    ts = TokenStream(text)
    ts.keyword("rule")
    ts.next("[")
    rule_name = name
    sections: dict[str, list] = {"left": [], "context": [], "right": []}
    while True:
        tok = ts.peek()
        if tok is None:
            raise ParseError(ts.line, "unexpected end of input inside rule")
        if tok.kind == "]":
            break
        if tok.kind != "word":
            raise ParseError(tok.line, f"unexpected {tok.value!r} in rule")
        ts.pos += 1
        if tok.value == "ruleID":
            rule_name = ts.next("str").value
        elif tok.value in sections:
            ts.next("[")
            sections[tok.value].extend(parse_items(ts))
            ts.next("]")
        else:
            raise ParseError(tok.line, f"unknown rule section {tok.value!r}")
    ts.next("]")
    if not ts.at_end():
        raise ParseError(ts.line, "trailing input after rule")

    order: dict[int, int] = {}
    nodes: dict[str, dict[int, str]] = {s: {} for s in sections}
    edges: dict[str, dict[tuple[int, int], str]] = {s: {} for s in sections}
    for s in ("left", "context", "right"):
        for it in sections[s]:
            if it.kind == "node":
                v = it.ids[0]
                if v in nodes[s]:
                    raise IllFormedRule(f"duplicate node id {v} in {s}")
                nodes[s][v] = it.label
                order.setdefault(v, len(order))
            else:
                a, b = it.ids
                if a == b:
                    raise IllFormedRule(f"self-loop at node {a}")
                key = (min(a, b), max(a, b))
                if key in edges[s]:
                    raise IllFormedRule(f"duplicate edge {a}-{b} in {s}")
                edges[s][key] = it.label
    ctx, left, right = nodes["context"], nodes["left"], nodes["right"]
    for v in ctx:
        if v in left or v in right:
            raise IllFormedRule(f"node {v} is in context and also in left or right")
    k_ids = sorted(set(ctx) | (set(left) & set(right)), key=order.get)
    l_ids = sorted(set(ctx) | set(left), key=order.get)
    r_ids = sorted(set(ctx) | set(right), key=order.get)

    def side_label(v, side):
        return ctx[v] if v in ctx else nodes[side][v]

    ectx, eleft, eright = edges["context"], edges["left"], edges["right"]
    kset, lset, rset = set(k_ids), set(l_ids), set(r_ids)
    for e in ectx:
        if e in eleft or e in eright:
            raise IllFormedRule(f"edge {e[0]}-{e[1]} is in context and also in left or right")
        if not (e[0] in kset and e[1] in kset):
            raise IllFormedRule(f"context edge {e[0]}-{e[1]} has an endpoint outside the context")
    for e in eleft:
        if not (e[0] in lset and e[1] in lset):
            raise IllFormedRule(f"left edge {e[0]}-{e[1]} has an endpoint outside the left side")
    for e in eright:
        if not (e[0] in rset and e[1] in rset):
            raise IllFormedRule(f"right edge {e[0]}-{e[1]} has an endpoint outside the right side")
    k_edges = {e: lab for e, lab in ectx.items()}
    for e in set(eleft) & set(eright):
        if not (e[0] in kset and e[1] in kset):
            raise IllFormedRule(f"edge {e[0]}-{e[1]} kept across a deleted or created node")
        k_edges[e] = eleft[e]

    def build(ids, side):
        pos = {v: i for i, v in enumerate(ids)}
        es = dict(ectx)
        if side is not None:
            es.update(edges[side])
        else:
            es = k_edges
        g = LabeledGraph([side_label(v, side) if side else (ctx[v] if v in ctx else left[v]) for v in ids],
                         ((pos[a], pos[b], lab) for (a, b), lab in sorted(es.items(), key=lambda t: (order[t[0][0]], order[t[0][1]]))))
        return g, pos

    L, lpos = build(l_ids, "left")
    R, rpos = build(r_ids, "right")
    K, _ = build(k_ids, None)
    return Rule(rule_name or "rule", L, K, R, [lpos[v] for v in k_ids], [rpos[v] for v in k_ids],
                {"K": k_ids, "L": l_ids, "R": r_ids})


def render_rule(p: Rule) -> str:
    """Serialize ``p``; K vertices keep their ids, others use fresh ids if needed."""
    kid = list(p.ids["K"])
    lid = list(p.ids["L"])
    rid = list(p.ids["R"])
    # ids must agree on K vertices and be distinct elsewhere
    for k in range(len(p.K)):
        lid[p.l[k]] = kid[k]
        rid[p.r[k]] = kid[k]
    used = set(kid)
    next_id = max([x for x in lid + rid + kid if isinstance(x, int)] + [-1]) + 1
    for arr, fixed in ((lid, set(p.l)), (rid, set(p.r))):
        for x in range(len(arr)):
            if x in fixed:
                continue
            if not isinstance(arr[x], int) or arr[x] in used:
                arr[x] = next_id
                next_id += 1
            used.add(arr[x])

    lines = ["rule [", f'  ruleID "{_escape(p.name)}"']
    lk = set(p.l)
    rk = set(p.r)
    left, ctx, right = [], [], []
    for k in range(len(p.K)):
        a, b = p.K.labels[k], p.R.labels[p.r[k]]
        if a == b:
            ctx.append(f'    node [ id {kid[k]} label "{_escape(a)}" ]')
        else:
            left.append(f'    node [ id {kid[k]} label "{_escape(a)}" ]')
            right.append(f'    node [ id {kid[k]} label "{_escape(b)}" ]')
    for x in range(len(p.L)):
        if x not in lk:
            left.append(f'    node [ id {lid[x]} label "{_escape(p.L.labels[x])}" ]')
    for x in range(len(p.R)):
        if x not in rk:
            right.append(f'    node [ id {rid[x]} label "{_escape(p.R.labels[x])}" ]')
    k_of_r = {x: k for k, x in enumerate(p.r)}
    for (x, y), lab in sorted(p.L.edges.items()):
        kx, ky = p.k_of_l[x], p.k_of_l[y]
        line = f'    edge [ source {lid[x]} target {lid[y]} label "{_escape(lab)}" ]'
        if kx is not None and ky is not None and p.K.has_edge(kx, ky):
            rl = p.R.edge_label(p.r[kx], p.r[ky])
            if rl == lab:
                ctx.append(line)
            else:
                left.append(line)
                right.append(f'    edge [ source {lid[x]} target {lid[y]} label "{_escape(rl)}" ]')
        else:
            left.append(line)
    for (x, y), lab in sorted(p.R.edges.items()):
        kx, ky = k_of_r.get(x), k_of_r.get(y)
        if kx is not None and ky is not None and p.K.has_edge(kx, ky):
            continue
        right.append(f'    edge [ source {rid[x]} target {rid[y]} label "{_escape(lab)}" ]')
    for sec, body in (("left", left), ("context", ctx), ("right", right)):
        lines.append(f"  {sec} [")
        lines.extend(body)
        lines.append("  ]")
    lines.append("]")
    return "\n".join(lines) + "\n"


def read_rule(path) -> Rule:
    from pathlib import Path

    p = Path(path)
    return parse_rule(p.read_text(encoding="utf-8"), name=p.stem)


# --- validity ------------------------------------------------------------------

def check_valid(p: Rule, host: LabeledGraph, m: dict[int, int] | Sequence[int | None]) -> bool:
    """Dangling and parallel-edge conditions for a (possibly partial) match.

    ``m`` maps L vertices to host vertices; unmapped vertices are ``None`` or
    absent. Only vertices and pairs defined in ``m`` are checked.
    """
    get = m.get if isinstance(m, dict) else (lambda v: m[v] if v < len(m) else None)
    for u in p.deleted:
        gu = get(u)
        if gu is None:
            continue
        for v2 in host.adj[gu]:
            if not any(get(v) == v2 for v in p.L.adj[u]):
                return False
    for a, b in p.created_pairs:
        ga, gb = get(a), get(b)
        if ga is not None and gb is not None and host.has_edge(ga, gb):
            return False
    return True


def component_valid(p: Rule, i: int, host: LabeledGraph, phi: Sequence[int]) -> bool:
    """Validity of a single monomorphism ``L_i -> host`` on its own."""
    off = p.offsets[i]
    for w in range(len(phi)):
        u = off + w
        if u in p.deleted and host.degree(phi[w]) != p.L.degree(u):
            return False
    for a, b in p.created_pairs:
        if p.comp_of[a] == i and p.comp_of[b] == i and host.has_edge(phi[a - off], phi[b - off]):
            return False
    return True


def cross_pairs(p: Rule) -> tuple[tuple[tuple[int, int, int], ...], ...]:
    """Per component ``i``: created pairs ``(local a in L_i, j, local b in L_j)`` with ``j < i``."""
    out: list[list[tuple[int, int, int]]] = [[] for _ in range(p.k)]
    for a, b in p.created_pairs:
        ca, cb = p.comp_of[a], p.comp_of[b]
        if ca == cb:
            continue
        if ca < cb:
            a, b, ca, cb = b, a, cb, ca
        out[ca].append((a - p.offsets[ca], cb, b - p.offsets[cb]))
    return tuple(tuple(x) for x in out)


def extension_valid(p: Rule, host: UnionGraph, slots: Sequence[tuple[int, Sequence[int]] | None],
                    i: int, x: int, phi: Sequence[int]) -> bool:
    """Whether extending the partial match ``slots`` by ``phi: L_i -> G_x`` is valid.

    ``slots[j]`` is ``(x_j, phi_j)`` for matched components and ``None``
    otherwise; ``slots[i]`` must be ``None`` and ``slots`` itself valid.
    """
    if slots[i] is not None:
        return False
    gx = host.components[x]
    image = set(phi)
    if len(image) != len(phi):
        return False
    for s in slots:
        if s is not None and s[0] == x and image.intersection(s[1]):
            return False
    if not component_valid(p, i, gx, phi):
        return False
    for a, j, b in cross_pairs(p)[i]:
        s = slots[j]
        if s is not None and s[0] == x and gx.has_edge(phi[a], s[1][b]):
            return False
    return True


def global_match(p: Rule, host: UnionGraph, slots: Sequence[tuple[int, Sequence[int]]]) -> tuple[int, ...]:
    """Flatten per-component slots into a map L vertex -> global host vertex."""
    offs = host.offsets
    out = []
    for (x, phi) in slots:
        out.extend(offs[x] + v for v in phi)
    return tuple(out)


def is_proper(host: UnionGraph, slots: Sequence[tuple[int, Sequence[int]]]) -> bool:
    return {x for x, _ in slots} == set(range(len(host)))


def is_monomorphism(pattern: LabeledGraph, host: LabeledGraph, m: Sequence[int]) -> bool:
    if len(set(m)) != len(m):
        return False
    if any(pattern.labels[v] != host.labels[m[v]] for v in range(len(pattern))):
        return False
    return all(host.edge_label(m[a], m[b]) == lab for (a, b), lab in pattern.edges.items())


def apply_flat(p: Rule, G: LabeledGraph, m: Sequence[int]) -> LabeledGraph:
    """Apply ``p`` at the total match ``m: L -> G``; returns the result graph H.

    Kept host vertices retain their relative order; created vertices follow
    in R order.
    """
    if len(m) != len(p.L) or not is_monomorphism(p.L, G, m):
        raise InvalidMatch("match is not a total monomorphism")
    if not check_valid(p, G, m):
        raise InvalidMatch("match violates the dangling or parallel-edge condition")
    removed = {m[u] for u in p.deleted}
    labels = list(G.labels)
    for k, (_, right) in p.vertex_overrides.items():
        labels[m[p.l[k]]] = right
    keep = [v for v in range(len(G)) if v not in removed]
    new_index = {v: i for i, v in enumerate(keep)}
    out_labels = [labels[v] for v in keep]
    edges: dict[tuple[int, int], str] = {}
    deleted_edges = set()
    for (a, b) in p.L.edges:
        ka, kb = p.k_of_l[a], p.k_of_l[b]
        if ka is None or kb is None or not p.K.has_edge(ka, kb):
            ga, gb = m[a], m[b]
            deleted_edges.add((min(ga, gb), max(ga, gb)))
    for (a, b), lab in G.edges.items():
        if (a, b) in deleted_edges:
            continue
        if a in removed or b in removed:
            raise InvalidMatch("dangling edge")
        edges[(new_index[a], new_index[b])] = lab
    for (ka, kb), (_, right) in p.edge_overrides.items():
        ga, gb = new_index[m[p.l[ka]]], new_index[m[p.l[kb]]]
        edges[(min(ga, gb), max(ga, gb))] = right
    k_of_r = {x: k for k, x in enumerate(p.r)}
    r_to_h = {}
    for x in range(len(p.R)):
        k = k_of_r.get(x)
        if k is None:
            r_to_h[x] = len(out_labels)
            out_labels.append(p.R.labels[x])
        else:
            r_to_h[x] = new_index[m[p.l[k]]]
    for (x, y), lab in p.R.edges.items():
        kx, ky = k_of_r.get(x), k_of_r.get(y)
        if kx is not None and ky is not None and p.K.has_edge(kx, ky):
            continue
        hx, hy = r_to_h[x], r_to_h[y]
        key = (min(hx, hy), max(hx, hy))
        if key in edges:
            raise InvalidMatch("parallel edge")
        edges[key] = lab
    return LabeledGraph(out_labels, ((a, b, lab) for (a, b), lab in edges.items()))


def apply(p: Rule, host: UnionGraph, slots: Sequence[tuple[int, Sequence[int]]]) -> UnionGraph:
    """Apply ``p`` to the union graph at a total, proper match; result split into components."""
    if len(slots) != p.k or any(s is None for s in slots):
        raise InvalidMatch("match is not total")
    if not is_proper(host, slots):
        raise InvalidMatch("match is not proper")
    H = apply_flat(p, host.flatten(), global_match(p, host, slots))
    return UnionGraph(connected_components(H).components)


# --- rule automorphisms ----------------------------------------------------------

def rule_encoding(p: Rule) -> tuple[LabeledGraph, int, int]:
    """Colored graph on L, K, R with l- and r-arrows.

    Vertices are L first, then K, then R. Returns the graph and the offsets
    of K and R.
    """
    nl, nk = len(p.L), len(p.K)
    labels = [f"L|{x}" for x in p.L.labels] + [f"K|{x}" for x in p.K.labels] + [f"R|{x}" for x in p.R.labels]
    edges = [(a, b, f"e|{lab}") for (a, b), lab in p.L.edges.items()]
    edges += [(nl + a, nl + b, f"e|{lab}") for (a, b), lab in p.K.edges.items()]
    edges += [(nl + nk + a, nl + nk + b, f"e|{lab}") for (a, b), lab in p.R.edges.items()]
    edges += [(nl + k, p.l[k], "l") for k in range(nk)]
    edges += [(nl + k, nl + nk + p.r[k], "r") for k in range(nk)]
    return LabeledGraph(labels, edges), nl, nl + nk


def encode_rule(p: Rule) -> LabeledGraph:
    return rule_encoding(p)[0]


@dataclass
class RuleAutInfo:
    """Symmetry data of a rule, restricted to its left side.

    ``group`` is the projection of the rule automorphism group onto L.
    ``classes`` partitions component indices under rule isomorphism; each
    class is listed with its smallest member first. ``rho[j]`` maps local
    vertices of the representative of j's class to local vertices of L_j.
    ``local[i]`` lists restrictions to L_i (local indices) of rule
    automorphisms that fix L_1..L_{i-1} pointwise and map L_i onto itself.
    ``swap_ok[(j, i)]`` says whether the order check between j < i is backed
    by a rule automorphism fixing L_1..L_{j-1} that moves L_j onto L_i
    compatibly with ``rho``.
    """

    generators: tuple[Perm, ...]
    group_order: int
    classes: tuple[tuple[int, ...], ...]
    class_of: tuple[int, ...]
    rho: tuple[tuple[int, ...], ...]
    local: tuple[tuple[tuple[int, ...], ...], ...]
    swap_ok: dict = field(default_factory=dict)
    truncated: bool = False

    def rep(self, i: int) -> int:
        return self.classes[self.class_of[i]][0]

    def equivalent(self, i: int, j: int) -> bool:
        return self.class_of[i] == self.class_of[j]

    def ordered_pairs(self, i: int) -> tuple[int, ...]:
        """Earlier components whose order relative to L_i is enforced."""
        return tuple(j for j in range(i) if self.swap_ok.get((j, i)))


def trivial_aut_info(p: Rule) -> RuleAutInfo:
    k = p.k
    return RuleAutInfo((), 1, tuple((i,) for i in range(k)), tuple(range(k)),
                       tuple(tuple(range(len(c))) for c in p.left.components),
                       tuple((tuple(range(len(c))),) for c in p.left.components), {}, False)


def compute_rule_aut(p: Rule, cap: int = DEFAULT_ELEMENT_CAP) -> RuleAutInfo:
    enc, _, _ = rule_encoding(p)
    nl = len(p.L)
    gens = []
    for g in canonical_form(enc).generators:
        proj = tuple(g[v] for v in range(nl))
        if any(i != x for i, x in enumerate(proj)) and proj not in gens:
            gens.append(proj)
    if not gens:
        return trivial_aut_info(p)
    group = build_group(nl, gens)
    elements, truncated = group.elements(cap)
    if truncated:
        info = trivial_aut_info(p)
        info.truncated = True
        return info
    k = p.k
    offs = p.offsets
    sizes = [len(c) for c in p.left.components]
    comps = [p.component_vertices(i) for i in range(k)]
    # component permutation induced by each element
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in gens:
        for i in range(k):
            j = p.comp_of[g[offs[i]]]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    classes = tuple(tuple(sorted(v)) for _, v in sorted(groups.items()))
    class_of = [0] * k
    for c, members in enumerate(classes):
        for i in members:
            class_of[i] = c

    rho: list[tuple[int, ...] | None] = [None] * k
    for members in classes:
        rep = members[0]
        rho[rep] = tuple(range(sizes[rep]))
    for g in elements:
        for members in classes:
            rep = members[0]
            tgt = p.comp_of[g[offs[rep]]]
            if rho[tgt] is None:
                rho[tgt] = tuple(g[offs[rep] + w] - offs[tgt] for w in range(sizes[rep]))
    local: list[set] = [set() for _ in range(k)]
    swap_ok: dict = {}
    for g in elements:
        fixed_prefix = 0  # number of leading components fixed pointwise
        while fixed_prefix < k and all(g[v] == v for v in comps[fixed_prefix]):
            fixed_prefix += 1
        for i in range(k):
            tgt = p.comp_of[g[offs[i]]]
            restr = tuple(g[offs[i] + w] - offs[tgt] for w in range(sizes[i]))
            if i <= fixed_prefix:
                if tgt == i:
                    local[i].add(restr)
                elif tgt > i:
                    swap_ok.setdefault((i, tgt), set()).add(restr)
            if i >= fixed_prefix:
                break
    # keep the pairs whose swap matches the representative isomorphisms
    ok = {}
    for (j, i), restrs in swap_ok.items():
        need = _compose_local(rho[i], _invert_local(rho[j]))
        ok[(j, i)] = need in restrs
    return RuleAutInfo(tuple(gens), group.order(), classes, tuple(class_of), tuple(rho),
                       tuple(tuple(sorted(s)) for s in local), ok, False)


def _invert_local(p: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _compose_local(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(a[x] for x in b)


def rule_automorphisms(p: Rule, cap: int = DEFAULT_ELEMENT_CAP) -> list[Perm]:
    """All rule automorphisms projected to L (the group A_L)."""
    enc, _, _ = rule_encoding(p)
    nl = len(p.L)
    gens = [tuple(g[v] for v in range(nl)) for g in canonical_form(enc).generators]
    elements, _ = build_group(nl, gens).elements(cap)
    return elements


def rule_code(p: Rule) -> CanonicalCode:
    return canonical_form(encode_rule(p)).code

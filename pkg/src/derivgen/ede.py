"""Enumeration of proper derivations over combinations of input graphs.

The search extends a partial match one left component at a time, growing
the host union graph alongside it: each monomorphism of ``L_i`` is tried on
every existing host component showing the same graph, then on a fresh copy
appended at the end. The symmetry modes additionally demand that
extensions are order-preserving (rule-isomorphic components appear in
increasing monomorphism order) and minimal (no local rule automorphism
combined with a host automorphism fixing the already matched vertices gives
a smaller image vector).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .canon import CanonicalCode, canonical_form, encode_derivation
from .graph import GraphError, LabeledGraph, UnionGraph
from .match import Entry, MonoDatabase, build_database, graph_codes
from .perm import PermGroup, build_group, min_image, pointwise_stabilizer
from .rule import Rule, RuleAutInfo, apply, cross_pairs, global_match


class EnumerationMode(enum.Enum):
    EDE = "ede"
    EDE_S = "ede-s"
    EDE_SS = "ede-ss"

    @classmethod
    def parse(cls, text: str) -> "EnumerationMode":
        key = text.strip().lower().replace("_", "-")
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown enumeration mode {text!r}")


class IncomparableComponents(GraphError):
    pass


class InvalidDerivation(GraphError):
    pass


@dataclass(frozen=True)
class GraphOrder:
    """Total order on the input graphs: lexicographic on canonical codes."""

    rank: tuple[int, ...]

    @classmethod
    def from_graphs(cls, graphs: Sequence[LabeledGraph]) -> "GraphOrder":
        return cls(graph_codes(graphs)[1])

    def less(self, a: int, b: int) -> bool:
        return self.rank[a] < self.rank[b]


def mono_key(order: GraphOrder, graph: int, x: int, vec: Sequence[int]) -> tuple:
    return (order.rank[graph], x, tuple(vec))


def mono_less(order: GraphOrder, a: tuple[int, int, Sequence[int]], b: tuple[int, int, Sequence[int]]) -> bool:
    """Monomorphism order on ``(graph, host component, normalized vector)`` triples.

    Smaller graph first, then smaller host component, then the
    lexicographically smaller image vector.
    """
    if len(a[2]) != len(b[2]):
        raise IncomparableComponents("monomorphisms of non-isomorphic components")
    return mono_key(order, *a) < mono_key(order, *b)


# --- derivations ----------------------------------------------------------------

@dataclass
class Derivation:
    """A proper direct derivation: host union graph, total match, result."""

    rule: Rule
    host: UnionGraph
    graph_ids: tuple[int, ...]  # input graph index of each host component
    slots: tuple[tuple[int, tuple[int, ...]], ...]  # per left component: (host component, phi)
    _result: UnionGraph | None = field(default=None, repr=False)
    _code: CanonicalCode | None = field(default=None, repr=False)

    @property
    def match(self) -> tuple[int, ...]:
        """Map from L vertex to global host vertex."""
        return global_match(self.rule, self.host, self.slots)

    @property
    def result(self) -> UnionGraph:
        if self._result is None:
            self._result = apply(self.rule, self.host, self.slots)
        return self._result

    @property
    def code(self) -> CanonicalCode:
        if self._code is None:
            self._code = derivation_code(self)
        return self._code

    def order_key(self) -> tuple:
        """Host-order-sensitive identity of the derivation."""
        return (self.graph_ids, self.slots)

    def to_json(self) -> dict:
        return {
            "rule": self.rule.name,
            "host": list(self.graph_ids),
            "match": [[x, list(phi)] for x, phi in self.slots],
            "code": self.code.hex(),
        }


def derivation_code(d: Derivation) -> CanonicalCode:
    if len(d.slots) != d.rule.k:
        raise InvalidDerivation("match is not total")
    return encode_derivation(d.rule, d.host.flatten(), d.match)


# --- the search ------------------------------------------------------------------

class _HostGroups:
    """Automorphism groups of the input graphs, built on demand."""

    def __init__(self, graphs: Sequence[LabeledGraph]):
        self.graphs = graphs
        self.gens: dict[int, tuple] = {}
        self.groups: dict[int, PermGroup] = {}

    def generators(self, gi: int) -> tuple:
        if gi not in self.gens:
            self.gens[gi] = canonical_form(self.graphs[gi]).generators
        return self.gens[gi]

    def group(self, gi: int) -> PermGroup:
        if gi not in self.groups:
            self.groups[gi] = build_group(len(self.graphs[gi]), self.generators(gi))
        return self.groups[gi]


def _mask_points(mask: int) -> tuple[int, ...]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


class Enumerator:
    """Depth-first enumeration over one rule and one set of input graphs.

    ``new`` optionally marks input graphs as new; only derivations whose host
    uses at least one of them are produced.
    """

    def __init__(self, graphs: Sequence[LabeledGraph], rule: Rule,
                 mode: EnumerationMode = EnumerationMode.EDE, *,
                 new: Sequence[bool] | None = None, info: RuleAutInfo | None = None,
                 codes=None, host_groups: _HostGroups | None = None):
        self.graphs = tuple(graphs)
        self.rule = rule
        self.mode = mode
        self.symmetric = mode is not EnumerationMode.EDE
        self.info = info if info is not None else rule.aut_info()
        if codes is None:
            codes = graph_codes(self.graphs)
        self.codes, self.rank = codes
        self.db: MonoDatabase = build_database(rule, self.graphs, prefilter=self.symmetric,
                                               info=self.info, codes=codes)
        self.new = tuple(new) if new is not None else None
        self.host_groups = host_groups or _HostGroups(self.graphs)
        k = rule.k
        self.cross = cross_pairs(rule)
        self.ordered = tuple(self.info.ordered_pairs(i) if self.symmetric else () for i in range(k))
        self.local = tuple(
            tuple(a for a in self.info.local[i] if any(x != y for x, y in enumerate(a)))
            for i in range(k))
        if self.new is not None:
            can = [False] * (k + 1)
            for i in range(k - 1, -1, -1):
                can[i] = can[i + 1] or any(self.new[e.graph] for e in self.db.entries[i])
            self.can_new = can
        self.stats = {"yields": 0, "extensions": 0}

    def __iter__(self) -> Iterator[Derivation]:
        return self.run()

    def run(self) -> Iterator[Derivation]:
        if self.db.empty:
            return
        k = self.rule.k
        host: list[int] = []
        used: list[int] = []
        slots: list[tuple[int, Entry] | None] = [None] * k
        entries = self.db.entries
        new = self.new
        n_new = 0

        def rec(i: int):
            nonlocal n_new
            if new is not None and n_new == 0 and not self.can_new[i]:
                return
            if i == k:
                self.stats["yields"] += 1
                yield self._derivation(host, slots)
                return
            for e in entries[i]:
                g = e.graph
                for x in range(len(host)):
                    if host[x] == g and self._extend_ok(i, x, e, host, used, slots):
                        slots[i] = (x, e)
                        used[x] |= e.mask
                        yield from rec(i + 1)
                        used[x] &= ~e.mask
                        slots[i] = None
                x = len(host)
                host.append(g)
                used.append(0)
                is_new = new is not None and new[g]
                n_new += is_new
                if self._extend_ok(i, x, e, host, used, slots):
                    slots[i] = (x, e)
                    used[x] = e.mask
                    yield from rec(i + 1)
                    slots[i] = None
                n_new -= is_new
                host.pop()
                used.pop()

        yield from rec(0)

    def _extend_ok(self, i: int, x: int, e: Entry, host, used, slots) -> bool:
        if used[x] & e.mask:
            return False
        self.stats["extensions"] += 1
        g = self.graphs[e.graph]
        for a, j, b in self.cross[i]:
            s = slots[j]
            if s is not None and s[0] == x and g.has_edge(e.phi[a], s[1].phi[b]):
                return False
        if not self.symmetric:
            return True
        key = (self.rank[e.graph], x, e.vec)
        for j in self.ordered[i]:
            xj, ej = slots[j]
            if not (self.rank[ej.graph], xj, ej.vec) < key:
                return False
        return self._minimal(i, x, e, used[x])

    def _minimal(self, i: int, x: int, e: Entry, matched: int) -> bool:
        """Minimality of ``phi`` under local rule automorphisms and host automorphisms fixing ``matched``."""
        gi = e.graph
        rho = self.info.rho[i]
        phi = e.phi
        vec = e.vec
        local = self.local[i]
        if self.mode is EnumerationMode.EDE_S:
            group = self.host_groups.group(gi)
            if group.is_trivial():
                return True  # the local part was settled when building the database
            stab = pointwise_stabilizer(group, _mask_points(matched)) if matched else group
            if stab.is_trivial():
                return True
            if min_image(stab, vec) < vec:
                return False
            for a in local:
                if min_image(stab, [phi[a[w]] for w in rho]) < vec:
                    return False
            return True
        gens = [h for h in self.host_groups.generators(gi)
                if all(h[v] == v for v in _mask_points(matched))] if matched else \
            list(self.host_groups.generators(gi))
        if not gens:
            return True
        for h in gens:
            if tuple(h[v] for v in vec) < vec:
                return False
        for a in local:
            seq = [phi[a[w]] for w in rho]
            for h in gens:
                if tuple(h[v] for v in seq) < vec:
                    return False
        return True

    def _derivation(self, host: list[int], slots) -> Derivation:
        return make_derivation(self.rule, self.graphs, host, tuple((x, e.phi) for x, e in slots))


def make_derivation(rule: Rule, graphs: Sequence[LabeledGraph], graph_ids: Sequence[int],
                    slots: Sequence[tuple[int, Sequence[int]]]) -> Derivation:
    """Derivation over ``graphs[graph_ids[0]], graphs[graph_ids[1]], ...``; inputs are trusted connected."""
    u = UnionGraph.__new__(UnionGraph)
    object.__setattr__(u, "components", tuple(graphs[g] for g in graph_ids))
    object.__setattr__(u, "origin", None)
    return Derivation(rule, u, tuple(graph_ids), tuple((x, tuple(phi)) for x, phi in slots))


def enumerate_derivations(graphs: Sequence[LabeledGraph], rule: Rule,
                          mode: EnumerationMode | str = EnumerationMode.EDE,
                          sink=None, **kwargs) -> Iterator[Derivation]:
    """Stream the proper derivations of ``rule`` over combinations of ``graphs``.

    If ``sink`` is given it is called with every derivation and the count is
    returned instead of an iterator.
    """
    if isinstance(mode, str):
        mode = EnumerationMode.parse(mode)
    it = Enumerator(graphs, rule, mode, **kwargs).run()
    if sink is None:
        return it
    count = 0
    for d in it:
        sink(d)
        count += 1
    return count


# --- predicates on explicit partial matches ----------------------------------------

def is_order_preserving(rule: Rule, order: GraphOrder, host_ids: Sequence[int],
                        slots: Sequence[tuple[int, Sequence[int]] | None], i: int,
                        x: int, phi: Sequence[int], info: RuleAutInfo | None = None) -> bool:
    """Whether extending ``slots`` (defined on L_1..L_{i-1}) by ``phi: L_i -> G_x`` keeps rule-isomorphic components in increasing order."""
    info = info or rule.aut_info()
    key = mono_key(order, host_ids[x], x, [phi[w] for w in info.rho[i]])
    for j in info.ordered_pairs(i):
        xj, phij = slots[j]
        if not mono_key(order, host_ids[xj], xj, [phij[w] for w in info.rho[j]]) < key:
            return False
    return True


def is_minimal_extension(rule: Rule, graph: LabeledGraph, matched: Sequence[int], i: int,
                         phi: Sequence[int], mode: EnumerationMode | str,
                         info: RuleAutInfo | None = None) -> bool:
    """Minimality of ``phi: L_i -> graph`` given the host vertices already matched in that component."""
    if isinstance(mode, str):
        mode = EnumerationMode.parse(mode)
    if mode is EnumerationMode.EDE:
        return True
    info = info or rule.aut_info()
    rho = info.rho[i]
    vec = tuple(phi[w] for w in rho)
    gens = canonical_form(graph).generators
    fixed = set(matched)
    if mode is EnumerationMode.EDE_S:
        group = build_group(len(graph), gens)
        stab = pointwise_stabilizer(group, sorted(fixed))
        return all(min_image(stab, [phi[a[w]] for w in rho]) >= vec for a in info.local[i])
    hs = [tuple(range(len(graph)))] + [h for h in gens if all(h[v] == v for v in fixed)]
    return all(tuple(h[phi[a[w]]] for w in rho) >= vec for a in info.local[i] for h in hs)

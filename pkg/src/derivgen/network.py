"""Iterative reaction-network expansion.

Each iteration applies every rule to the molecules known at its start and
adds the products afterwards. Only hosts containing at least one molecule
from the previous iteration are enumerated, since every other combination
was already explored. Molecules keep the vertex numbering of the derivation that first produced
them; reaction identities are computed in canonical numbering, so they do
not depend on which representative was kept.
"""
from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .canon import canonical_form
from .ede import EnumerationMode, Enumerator, _HostGroups, make_derivation
from .graph import GraphError, LabeledGraph
from .oracle import OracleBudget, brute_force_derivations
from .perm import PermGroup, build_group, inverse, min_image
from .rule import Rule, rule_automorphisms


ORACLE = "oracle"  # expansion mode driven by the brute-force enumerator


@dataclass(frozen=True)
class ExpansionPolicy:
    mode: EnumerationMode | str = EnumerationMode.EDE_S
    max_iterations: int | None = None
    max_product_vertices: int | None = None
    max_label_count: tuple[tuple[str, int], ...] = ()
    wall_clock_limit: float | None = None
    jobs: int = 1

    def __post_init__(self):
        if isinstance(self.mode, str) and self.mode != ORACLE:
            object.__setattr__(self, "mode", EnumerationMode.parse(self.mode))
        for name in ("max_iterations", "max_product_vertices", "wall_clock_limit"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        for lab, n in self.max_label_count:
            if n < 0:
                raise ValueError(f"label cap for {lab!r} must be nonnegative")

    def accepts(self, g: LabeledGraph) -> bool:
        if self.max_product_vertices is not None and len(g) > self.max_product_vertices:
            return False
        for lab, n in self.max_label_count:
            if sum(1 for x in g.labels if x == lab) > n:
                return False
        return True


@dataclass(frozen=True)
class Reaction:
    educts: tuple[str, ...]  # molecule codes (hex), sorted
    products: tuple[str, ...]
    rule: str
    code: str


@dataclass
class IterationStats:
    iteration: int
    yields: int
    new_molecules: int
    new_reactions: int
    molecules: int
    reactions: int
    millis: float
    rule_yields: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"iteration": self.iteration, "yields": self.yields,
                "new_molecules": self.new_molecules, "new_reactions": self.new_reactions,
                "molecules": self.molecules, "reactions": self.reactions,
                "millis": round(self.millis, 3), "rule_yields": dict(self.rule_yields)}


@dataclass
class ReactionNetwork:
    molecules: dict[str, LabeledGraph] = field(default_factory=dict)
    reactions: dict[str, Reaction] = field(default_factory=dict)
    stats: list[IterationStats] = field(default_factory=list)
    timed_out: bool = False
    limit_reached: bool = False

    @property
    def complete(self) -> bool:
        return not (self.timed_out or self.limit_reached)

    @property
    def total_yields(self) -> int:
        return sum(s.yields for s in self.stats)

    def add_molecule(self, g: LabeledGraph) -> tuple[str, bool]:
        """Store ``g`` under its canonical code, keeping its own vertex numbering."""
        code = canonical_form(g).hex
        if code in self.molecules:
            return code, False
        self.molecules[code] = g
        return code, True

    def content(self) -> tuple[frozenset, frozenset]:
        """Molecule codes and reaction codes: what mode-independence compares."""
        return frozenset(self.molecules), frozenset(self.reactions)

    def exit_code(self) -> int:
        if self.timed_out:
            return 3
        if self.limit_reached:
            return 4
        return 0


# --- derivation identity ---------------------------------------------------------

class DerivationKeyer:
    """Canonical key of a derivation, given the canonical codes of its host graphs.

    Matched vertices are first moved into canonical numbering. The key is the
    least, over all rule automorphisms, of the match written as (molecule,
    component by first use, vertex reduced by the automorphisms of that
    component). Two derivations get the same key exactly when they are
    isomorphic.
    """

    def __init__(self, rule: Rule, graphs: Sequence[LabeledGraph], codes: Sequence[str]):
        self.rule = rule
        self.auts = rule_automorphisms(rule)
        self.graphs = graphs
        self.ids = [hashlib.sha256(c.encode()).hexdigest()[:20] for c in codes]
        self.labeling: dict[int, tuple[int, ...]] = {}
        self.groups: dict[int, PermGroup] = {}
        self.memo: dict[tuple, tuple[int, ...]] = {}
        self.keys: dict[tuple, str] = {}
        self.comp_local = [(rule.comp_of[v], v - rule.offsets[rule.comp_of[v]]) for v in range(len(rule.L))]

    def _canonical(self, gi: int) -> tuple[tuple[int, ...], PermGroup]:
        lab = self.labeling.get(gi)
        if lab is None:
            c = canonical_form(self.graphs[gi])
            lab = c.labeling
            back = inverse(lab)
            gens = [tuple(lab[g[back[p]]] for p in range(len(lab))) for g in c.generators]
            self.labeling[gi] = lab
            self.groups[gi] = build_group(len(lab), gens)
        return lab, self.groups[gi]

    def _reduce(self, gi: int, seq: tuple[int, ...]) -> tuple[int, ...]:
        key = (gi, seq)
        out = self.memo.get(key)
        if out is None:
            lab, group = self._canonical(gi)
            out = min_image(group, [lab[u] for u in seq])
            self.memo[key] = out
        return out

    def key(self, graph_ids: Sequence[int], slots: Sequence[tuple[int, Sequence[int]]]) -> str:
        image = [(slots[i][0], slots[i][1][w]) for i, w in self.comp_local]
        # Matches that differ only by host automorphisms share this pre-key and are
        # isomorphic, so the minimization over rule automorphisms runs once for them.
        parts: dict[int, list[int]] = {}
        for x, u in image:
            parts.setdefault(x, []).append(u)
        pre = (tuple(graph_ids), tuple(x for x, _ in image),
               tuple(self._reduce(graph_ids[x], tuple(us)) for x, us in sorted(parts.items())))
        cached = self.keys.get(pre)
        if cached is None:
            cached = self.keys[pre] = self._key(graph_ids, image)
        return cached

    def _key(self, graph_ids: Sequence[int], image: list[tuple[int, int]]) -> str:
        best = None
        for a in self.auts:
            seq = [image[a[v]] for v in range(len(image))]
            first: dict[int, int] = {}
            parts: dict[int, list[int]] = {}
            for x, u in seq:
                if x not in first:
                    first[x] = len(first)
                    parts[x] = []
                parts[x].append(u)
            reduced = {x: iter(self._reduce(graph_ids[x], tuple(us))) for x, us in parts.items()}
            cand = tuple((self.ids[graph_ids[x]], first[x], next(reduced[x])) for x, _ in seq)
            if best is None or cand < best:
                best = cand
        payload = json.dumps([self.rule.name, best], separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


# --- expansion ----------------------------------------------------------------------

@dataclass
class _RuleOutcome:
    rule: str
    yields: int
    records: list  # (key, educt codes, product graphs) for accepted derivations
    timed_out: bool


def _oracle_stream(graphs, rule, new):
    result = brute_force_derivations(graphs, rule, OracleBudget(max_host_vertices=64, max_maps=10**7))
    for d in result.derivations:
        ids, slots = d.order_key()
        if new is None or any(new[g] for g in ids):
            yield make_derivation(rule, graphs, ids, slots)


def _run_rule(graphs: Sequence[LabeledGraph], codes: Sequence[str], new: Sequence[bool], rule: Rule,
              mode: EnumerationMode | str, policy: ExpansionPolicy, deadline: float | None,
              groups: _HostGroups | None = None) -> _RuleOutcome:
    if mode == ORACLE:
        stream = _oracle_stream(graphs, rule, new)
    else:
        rank = sorted(range(len(codes)), key=lambda i: codes[i])
        inv = [0] * len(codes)
        for r, i in enumerate(rank):
            inv[i] = r
        raw_codes = tuple(bytes.fromhex(c) for c in codes)
        groups = groups or _HostGroups(graphs)
        stream = Enumerator(graphs, rule, mode, new=new, codes=(raw_codes, tuple(inv)),
                            host_groups=groups).run()
    keyer = DerivationKeyer(rule, graphs, codes)
    seen: set[str] = set()
    records = []
    yields = 0
    timed_out = False
    for d in stream:
        yields += 1
        key = keyer.key(d.graph_ids, d.slots)
        if key not in seen:
            seen.add(key)
            products = d.result.components
            if all(policy.accepts(p) for p in products):
                records.append((key, tuple(sorted(codes[g] for g in d.graph_ids)), products))
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
    return _RuleOutcome(rule.name, yields, records, timed_out)


def _run_rule_job(args) -> _RuleOutcome:
    return _run_rule(*args)


def expand(initial: Iterable[LabeledGraph], rules: Sequence[Rule],
           policy: ExpansionPolicy = ExpansionPolicy(), net: ReactionNetwork | None = None,
           progress=None) -> ReactionNetwork:
    """Grow a reaction network breadth-first until nothing new appears or a limit is hit."""
    net = net if net is not None else ReactionNetwork()
    new_codes: set[str] = set()
    for g in initial:
        if not g.is_connected() or len(g) == 0:
            raise GraphError("initial graphs must be non-empty and connected")
        code, added = net.add_molecule(g)
        if added:
            new_codes.add(code)
    if not new_codes:
        # resuming: every known molecule counts as new, known reactions are skipped by key
        new_codes = set(net.molecules)
    net.timed_out = net.limit_reached = False
    start = time.monotonic()
    deadline = start + policy.wall_clock_limit if policy.wall_clock_limit else None
    iteration = len(net.stats)
    executor = ProcessPoolExecutor(policy.jobs) if policy.jobs > 1 and len(rules) > 1 else None
    try:
        while new_codes:
            if policy.max_iterations is not None and iteration >= policy.max_iterations:
                net.limit_reached = True
                break
            iteration += 1
            t0 = time.monotonic()
            codes = sorted(net.molecules)
            graphs = [net.molecules[c] for c in codes]
            new = [c in new_codes for c in codes]
            if executor is not None:
                jobs = [(graphs, codes, new, r, policy.mode, policy, deadline) for r in rules]
                outcomes = list(executor.map(_run_rule_job, jobs))
            else:
                groups = _HostGroups(graphs)
                outcomes = [_run_rule(graphs, codes, new, r, policy.mode, policy, deadline, groups)
                            for r in rules]
            if any(o.timed_out for o in outcomes):
                # the unfinished iteration is dropped so the network only holds complete ones
                net.timed_out = True
                break
            added_mols: dict[str, LabeledGraph] = {}
            added_rx = 0
            for out in outcomes:
                for key, educts, products in out.records:
                    if key in net.reactions:
                        continue
                    pcodes = []
                    for p in products:
                        pc = canonical_form(p).hex
                        pcodes.append(pc)
                        if pc not in net.molecules and pc not in added_mols:
                            added_mols[pc] = p
                    net.reactions[key] = Reaction(educts, tuple(sorted(pcodes)), out.rule, key)
                    added_rx += 1
            for pc in sorted(added_mols):
                net.add_molecule(added_mols[pc])
            stats = IterationStats(iteration, sum(o.yields for o in outcomes), len(added_mols), added_rx,
                                   len(net.molecules), len(net.reactions), (time.monotonic() - t0) * 1000,
                                   {o.rule: o.yields for o in outcomes})
            net.stats.append(stats)
            if progress is not None:
                progress(stats)
            new_codes = set(added_mols)
    finally:
        if executor is not None:
            executor.shutdown()
    return net


# --- persistence ------------------------------------------------------------------------

def _graph_json(g: LabeledGraph) -> dict:
    return {"labels": list(g.labels), "edges": [[u, v, lab] for u, v, lab in g.edge_list()]}


def export_json(net: ReactionNetwork) -> bytes:
    doc = {
        "molecules": [{"code": c, "graph": _graph_json(net.molecules[c])} for c in sorted(net.molecules)],
        "reactions": [{"code": r.code, "educts": list(r.educts), "products": list(r.products), "rule": r.rule}
                      for _, r in sorted(net.reactions.items())],
        "stats": [s.to_json() for s in net.stats],
        "complete": net.complete,
        "timed_out": net.timed_out,
        "limit_reached": net.limit_reached,
    }
    return json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=False).encode("utf-8")


def import_json(data: bytes | str) -> ReactionNetwork:
    doc = json.loads(data)
    net = ReactionNetwork()
    for m in doc.get("molecules", []):
        g = m["graph"]
        net.molecules[m["code"]] = LabeledGraph(g["labels"], [tuple(e) for e in g["edges"]])
    for r in doc.get("reactions", []):
        net.reactions[r["code"]] = Reaction(tuple(r["educts"]), tuple(r["products"]), r["rule"], r["code"])
    for s in doc.get("stats", []):
        net.stats.append(IterationStats(s["iteration"], s["yields"], s["new_molecules"], s["new_reactions"],
                                        s["molecules"], s["reactions"], s["millis"], dict(s.get("rule_yields", {}))))
    net.timed_out = bool(doc.get("timed_out", False))
    net.limit_reached = bool(doc.get("limit_reached", False))
    return net


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(net: ReactionNetwork) -> bytes:
    """Bipartite rendering: ellipses for molecules, boxes for reactions."""
    mols = sorted(net.molecules)
    idx = {c: i for i, c in enumerate(mols)}
    lines = ["digraph network {"]
    for c in mols:
        g = net.molecules[c]
        label = g.name or f"{len(g)}v {c[:8]}"
        lines.append(f"  m{idx[c]} [shape=ellipse, label={_dot_quote(label)}];")
    for j, (_, r) in enumerate(sorted(net.reactions.items())):
        lines.append(f"  r{j} [shape=box, label={_dot_quote(r.rule)}];")
        for e in r.educts:
            lines.append(f"  m{idx[e]} -> r{j};")
        for p in r.products:
            lines.append(f"  r{j} -> m{idx[p]};")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("DERIVGEN_JOBS", "1")))
    except ValueError:
        return 1

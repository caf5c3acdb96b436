"""Benchmark grammars and a runner that records per-iteration statistics.

Three families are provided. Binary strings grow chains of monomers one
rule application at a time and have no symmetry at all. Binary trees attach
two methane molecules to a leaf carbon, so the rule carries large local
automorphism groups. Formose is a small sugar chemistry built from
keto-enol tautomerization, aldol addition and their inverses.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence, Union

from .ede import EnumerationMode
from .graph import LabeledGraph, parse_graph
from .network import ExpansionPolicy, ReactionNetwork, expand
from .rule import Rule, invert_rule, parse_rule


class GrammarError(ValueError):
    pass


@dataclass(frozen=True)
class BinaryStrings:
    k: int = 2
    max_units: int = 7

    def __post_init__(self):
        if not 2 <= self.k <= 4:
            raise GrammarError("k must be between 2 and 4")
        if self.max_units < 1:
            raise GrammarError("max_units must be positive")

    @property
    def label(self) -> str:
        return f"strings:{self.k}"


@dataclass(frozen=True)
class BinaryTrees:
    max_iterations: int = 10

    def __post_init__(self):
        if self.max_iterations < 1:
            raise GrammarError("max_iterations must be positive")

    @property
    def label(self) -> str:
        return "trees"


@dataclass(frozen=True)
class Formose:
    max_carbons: int = 5

    def __post_init__(self):
        if not 1 <= self.max_carbons <= 13:
            raise GrammarError("max_carbons must be between 1 and 13")

    @property
    def label(self) -> str:
        return f"formose:{self.max_carbons}"


GrammarSpec = Union[BinaryStrings, BinaryTrees, Formose]


@dataclass
class Grammar:
    spec: GrammarSpec
    initial: list[LabeledGraph]
    rules: list[Rule]
    max_iterations: int | None = None
    max_product_vertices: int | None = None
    max_label_count: tuple[tuple[str, int], ...] = ()

    def policy(self, mode: EnumerationMode | str, wall_clock_limit: float | None = None,
               jobs: int = 1) -> ExpansionPolicy:
        return ExpansionPolicy(mode=mode, max_iterations=self.max_iterations,
                               max_product_vertices=self.max_product_vertices,
                               max_label_count=self.max_label_count,
                               wall_clock_limit=wall_clock_limit, jobs=jobs)


def parse_grammar(text: str) -> GrammarSpec:
    """``strings:K[:UNITS]``, ``trees[:ITERATIONS]`` or ``formose:N``."""
    parts = text.strip().lower().split(":")
    try:
        nums = [int(p) for p in parts[1:]]
    except ValueError:
        raise GrammarError(f"bad grammar parameters in {text!r}") from None
    name = parts[0]
    if name == "strings" and 1 <= len(nums) <= 2:
        return BinaryStrings(*nums)
    if name == "trees" and len(nums) <= 1:
        return BinaryTrees(*nums)
    if name == "formose" and len(nums) == 1:
        return Formose(nums[0])
    raise GrammarError(f"unknown grammar {text!r}")


# --- binary strings --------------------------------------------------------------

def _node(i: int, label: str) -> str:
    return f'node [ id {i} label "{label}" ]'


def _edge(a: int, b: int, label: str = "-") -> str:
    return f'edge [ source {a} target {b} label "{label}" ]'


def monomer(side: str) -> LabeledGraph:
    """A free monomer: backbone carbon and oxygen plus a side vertex."""
    return LabeledGraph(["C", "O", side], [(0, 1, "-"), (0, 2, "-")], name=f"monomer-{side}")


def chain_rule(k: int) -> Rule:
    """Append k-1 free monomers to the free oxygen end of a string.

    Components 1..k-1 are free monomers (C-O with both ends unbonded), the
    last component is the free oxygen of the string being extended. Bonded
    ends are relabeled, so no rule automorphism exists.
    """
    left, ctx, right = [], [], []
    end = 100
    for i in range(k - 1):
        c, o = 10 * i + 1, 10 * i + 2
        left += [_node(c, "C")]
        right += [_node(c, "Cb")]
        if i < k - 2:
            left.append(_node(o, "O"))
            right.append(_node(o, "Ob"))
        else:
            ctx.append(_node(o, "O"))
        ctx.append(_edge(c, o))
    left.append(_node(end, "O"))
    right.append(_node(end, "Ob"))
    right.append(_edge(end, 1))
    for i in range(k - 2):
        right.append(_edge(10 * i + 2, 10 * (i + 1) + 1))
    text = "rule [\n  ruleID \"chain(%d)\"\n  left [ %s ]\n  context [ %s ]\n  right [ %s ]\n]\n" % (
        k, " ".join(left), " ".join(ctx), " ".join(right))
    return parse_rule(text)


def binary_strings(spec: BinaryStrings) -> Grammar:
    rule = chain_rule(spec.k)
    info = rule.aut_info()
    assert rule.k == spec.k, "chain rule must have k left components"
    assert info.group_order == 1, "chain rules must have no symmetry"
    iterations = (spec.max_units - 1) // (spec.k - 1)
    return Grammar(spec, [monomer("A"), monomer("B")], [rule],
                   max_iterations=max(iterations, 1), max_product_vertices=3 * spec.max_units)


# --- binary trees ------------------------------------------------------------------

def methane() -> LabeledGraph:
    return LabeledGraph(["C", "H", "H", "H", "H"], [(0, i, "-") for i in range(1, 5)], name="methane")


def cyclobutane() -> LabeledGraph:
    """Four-cycle of carbons, two hydrogens on each."""
    labels = ["C"] * 4 + ["H"] * 8
    edges = [(i, (i + 1) % 4, "-") for i in range(4)]
    edges += [(i, 4 + 2 * i + j, "-") for i in range(4) for j in range(2)]
    return LabeledGraph(labels, edges, name="cyclobutane")


def add_children_rule() -> Rule:
    """Bond two methane carbons to a leaf carbon, each losing one hydrogen.

    The leaf must carry two hydrogens (both removed) and a carbon neighbor,
    so methane itself never plays the leaf.
    """
    left, ctx, right = [], [], []
    for base in (10, 20):
        c = base
        ctx.append(_node(c, "C"))
        left.append(_node(c + 1, "H"))
        left.append(_edge(c, c + 1))
        for j in range(2, 5):
            ctx.append(_node(c + j, "H"))
            ctx.append(_edge(c, c + j))
    p, x = 1, 2
    ctx += [_node(p, "C"), _node(x, "C"), _edge(p, x)]
    for h in (3, 4):
        left += [_node(h, "H"), _edge(x, h)]
    right += [_edge(x, 10), _edge(x, 20)]
    text = "rule [\n  ruleID \"add-children\"\n  left [ %s ]\n  context [ %s ]\n  right [ %s ]\n]\n" % (
        " ".join(left), " ".join(ctx), " ".join(right))
    return parse_rule(text)


def binary_trees(spec: BinaryTrees) -> Grammar:
    rule = add_children_rule()
    info = rule.aut_info()
    methanes = [i for i, comp in enumerate(rule.left.components) if len(comp) == 5]
    assert rule.k == 3 and len(methanes) == 2, "two methane components and one leaf component"
    assert all(len(info.local[i]) > 1 for i in methanes), "methane components must be symmetric"
    return Grammar(spec, [methane(), cyclobutane()], [rule], max_iterations=spec.max_iterations)


# --- formose -----------------------------------------------------------------------

def _fixture(name: str) -> str:
    return resources.files("derivgen").joinpath("data", "formose", name).read_text(encoding="utf-8")


def formose_rules() -> list[Rule]:
    out = []
    for fname in ("keto_enol.gml", "aldol.gml"):
        r = parse_rule(_fixture(fname))
        inv = invert_rule(r)
        inv.name = r.name + "-inverse"
        out += [r, inv]
    return out


def formose_molecules() -> list[LabeledGraph]:
    return [parse_graph(_fixture(f + ".gml"), name=f) for f in ("formaldehyde", "glycolaldehyde")]


def formose(spec: Formose) -> Grammar:
    rules = formose_rules()
    assert [r.k for r in rules] == [1, 1, 2, 1], "aldol addition joins two molecules"
    # starting molecules above the carbon cap are left out as well
    initial = [g for g in formose_molecules() if g.labels.count("C") <= spec.max_carbons]
    return Grammar(spec, initial, rules, max_label_count=(("C", spec.max_carbons),))


def generate_grammar(spec: GrammarSpec | str) -> Grammar:
    if isinstance(spec, str):
        spec = parse_grammar(spec)
    if isinstance(spec, BinaryStrings):
        return binary_strings(spec)
    if isinstance(spec, BinaryTrees):
        return binary_trees(spec)
    if isinstance(spec, Formose):
        return formose(spec)
    raise GrammarError(f"unsupported grammar spec {spec!r}")


# --- runner ----------------------------------------------------------------------------

CSV_COLUMNS = ("grammar", "mode", "iteration", "molecules", "reactions", "yields", "millis")


@dataclass
class BenchRun:
    grammar: str
    mode: str
    network: ReactionNetwork = field(repr=False)

    @property
    def timed_out(self) -> bool:
        return self.network.timed_out

    def rows(self) -> list[dict]:
        out = [{"grammar": self.grammar, "mode": self.mode, "iteration": s.iteration,
                "molecules": s.molecules, "reactions": s.reactions, "yields": s.yields,
                "millis": round(s.millis, 3)} for s in self.network.stats]
        if self.timed_out:
            last = out[-1] if out else {"molecules": len(self.network.molecules), "reactions": 0}
            out.append({"grammar": self.grammar, "mode": self.mode, "iteration": "timeout",
                        "molecules": last["molecules"], "reactions": last["reactions"],
                        "yields": 0, "millis": 0})
        return out

    def to_json(self) -> dict:
        net = self.network
        return {"grammar": self.grammar, "mode": self.mode, "molecules": len(net.molecules),
                "reactions": len(net.reactions), "yields": net.total_yields,
                "timed_out": net.timed_out, "limit_reached": net.limit_reached,
                "iterations": [s.to_json() for s in net.stats]}


def run_cell(spec: GrammarSpec, mode: EnumerationMode, timeout: float | None = None,
             jobs: int = 1) -> BenchRun:
    g = generate_grammar(spec)
    net = expand(g.initial, g.rules, g.policy(mode, timeout, jobs))
    return BenchRun(spec.label, mode.value, net)


def _run_cell_job(args) -> BenchRun:
    return run_cell(*args)


def run_benchmark(spec: GrammarSpec | str, modes: Sequence[EnumerationMode | str] = tuple(EnumerationMode),
                  timeout: float | None = None, jobs: int = 1) -> list[BenchRun]:
    """Expand the grammar once per mode; cells run in parallel when ``jobs`` > 1."""
    if isinstance(spec, str):
        spec = parse_grammar(spec)
    modes = [EnumerationMode.parse(m) if isinstance(m, str) else m for m in modes]
    cells = [(spec, m, timeout) for m in modes]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(min(jobs, len(cells))) as ex:
            return list(ex.map(_run_cell_job, cells))
    return [run_cell(*c) for c in cells]


def to_csv(runs: Sequence[BenchRun]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in runs:
        w.writerows(r.rows())
    return buf.getvalue()


def to_json(runs: Sequence[BenchRun]) -> str:
    return json.dumps([r.to_json() for r in runs], sort_keys=True, indent=1)

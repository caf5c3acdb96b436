"""Shared fixtures: small named graphs and rules, the oracle corpus and hypothesis strategies."""
from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path

from hypothesis import strategies as st

from derivgen.graph import LabeledGraph, connected_components, parse_graph
from derivgen.rule import Rule, parse_rule

DATA = Path(__file__).with_name("data")


def carbon() -> LabeledGraph:
    return LabeledGraph(["C"], name="C")


def ethane_core() -> LabeledGraph:
    return LabeledGraph(["C", "C"], [(0, 1, "-")], name="CC")


def square(labels=("h", "h", "h", "h")) -> LabeledGraph:
    """Four-cycle 0-1-3-2-0."""
    return LabeledGraph(list(labels), [(0, 1, "-"), (2, 3, "-"), (0, 2, "-"), (1, 3, "-")])


def methane() -> LabeledGraph:
    return LabeledGraph(["C", "H", "H", "H", "H"], [(0, i, "-") for i in range(1, 5)], name="methane")


def path(labels, edge="-") -> LabeledGraph:
    return LabeledGraph(list(labels), [(i, i + 1, edge) for i in range(len(labels) - 1)])


BOND_RULE = """rule [
  ruleID "bond"
  context [ node [ id 0 label "C" ] node [ id 1 label "C" ] ]
  right [ edge [ source 0 target 1 label "-" ] ]
]
"""


def bond_rule() -> Rule:
    """Two isolated carbons in the context and a bond between them on the right."""
    return parse_rule(BOND_RULE)


def identity_rule(name, labels, edges=()) -> Rule:
    g = LabeledGraph(labels, edges)
    ids = range(len(labels))
    return Rule(name, g, g, g, ids, ids)


def square_ctx():
    """Three isolated hollow vertices matched into a hollow four-cycle."""
    return identity_rule("square_ctx", ["h"] * 3), [square()]


def square_mixed():
    """A hollow edge and a filled vertex matched into a mixed four-cycle."""
    return identity_rule("square_mixed", ["h", "h", "f"], [(0, 1, "-")]), [square(("h", "h", "f", "f"))]


@lru_cache(maxsize=None)
def corpus_entries() -> tuple:
    return tuple(json.loads((DATA / "corpus.json").read_text(encoding="utf-8")))


def load_instance(entry):
    return parse_rule(entry["rule"]), [parse_graph(g) for g in entry["graphs"]]


def corpus():
    return [(e, *load_instance(e)) for e in corpus_entries()]


# --- hypothesis strategies ------------------------------------------------------------

@st.composite
def graphs(draw, min_size=1, max_size=7, labels="ab", edge_labels="xy", connected=False):
    n = draw(st.integers(min_size, max_size))
    vl = draw(st.lists(st.sampled_from(labels), min_size=n, max_size=n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    el = draw(st.lists(st.sampled_from(edge_labels), min_size=len(pairs), max_size=len(pairs)))
    edges = [(u, v, lab) for (u, v), keep, lab in zip(pairs, chosen, el) if keep]
    g = LabeledGraph(vl, edges)
    if connected:
        # tie every other component to the one holding vertex 0
        u = connected_components(g)
        sizes = [len(c) for c in u.components]
        starts = [u.origin[sum(sizes[:i])] for i in range(len(sizes))]
        edges += [(starts[0], s, edge_labels[0]) for s in starts[1:]]
        g = LabeledGraph(vl, edges)
    return g


@st.composite
def permutations_of(draw, n):
    return tuple(draw(st.permutations(range(n))))


@st.composite
def graph_and_perm(draw, **kw):
    g = draw(graphs(**kw))
    return g, draw(permutations_of(len(g)))

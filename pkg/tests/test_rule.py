import pytest
from hypothesis import given, settings

from derivgen.graph import GraphError, LabeledGraph, UnionGraph
from derivgen.oracle import rule_automorphisms_bf
from derivgen.rule import (IllFormedRule, InvalidMatch, Rule, apply, apply_flat, check_valid, invert_rule,
                           parse_rule, render_rule, rule_automorphisms)

from helpers import bond_rule, carbon, corpus, ethane_core, identity_rule, methane

DELETE_LEAF = """rule [
  ruleID "delete-leaf"
  left [ node [ id 1 label "H" ] edge [ source 0 target 1 label "-" ] ]
  context [ node [ id 0 label "C" ] ]
]
"""

RELABEL = """rule [
  ruleID "oxidize"
  left [ node [ id 0 label "C" ] edge [ source 0 target 1 label "-" ] ]
  context [ node [ id 1 label "O" ] ]
  right [ node [ id 0 label "Cx" ] edge [ source 0 target 1 label "=" ] node [ id 2 label "H" ]
          edge [ source 2 target 0 label "-" ] ]
]
"""


def test_bond_rule_shape():
    r = bond_rule()
    assert (len(r.L), len(r.K), len(r.R)) == (2, 2, 2)
    assert len(r.K.edges) == 0 and len(r.R.edges) == 1
    assert r.k == 2
    assert r.created_pairs == ((0, 1),)


def test_bond_rule_has_component_swap():
    assert sorted(rule_automorphisms(bond_rule())) == [(0, 1), (1, 0)]


def test_relabel_and_edge_change():
    r = parse_rule(RELABEL)
    assert r.vertex_overrides and r.edge_overrides
    H = apply_flat(r, LabeledGraph(["C", "O"], [(0, 1, "-")]), (0, 1))
    assert sorted(H.labels) == ["Cx", "H", "O"]
    assert sorted(H.edges.values()) == ["-", "="]


@pytest.mark.parametrize("text", [
    'rule [ left [ node [ id 0 label "C" ] ] context [ node [ id 0 label "C" ] ] ]',
    'rule [ context [ edge [ source 0 target 1 label "-" ] node [ id 0 label "C" ] ] ]',
    'rule [ context [ node [ id 0 label "C" ] edge [ source 0 target 0 label "-" ] ] ]',
    'rule [ middle [ ] ]',
    'rule [ context [ node [ id 0 label "C" ] node [ id 1 label "C" ] ] '
    'left [ edge [ source 0 target 1 label "-" ] ] right [ edge [ source 0 target 1 label "=" ] '
    'edge [ source 1 target 0 label "-" ] ] ]',
])
def test_ill_formed_rules_rejected(text):
    with pytest.raises(GraphError):
        parse_rule(text)


def test_constructor_checks_morphisms():
    L = LabeledGraph(["a", "b"], [(0, 1, "x")])
    K = LabeledGraph(["a", "b"], [(0, 1, "x")])
    R = LabeledGraph(["a", "b"])
    with pytest.raises(IllFormedRule):
        Rule("broken", L, K, R, [0, 1], [0, 1])
    with pytest.raises(IllFormedRule):
        Rule("broken", L, LabeledGraph(["b", "a"]), R, [0, 1], [0, 1])


@pytest.mark.parametrize("entry,rule,graphs", corpus()[:20], ids=lambda x: x["name"] if isinstance(x, dict) else "")
def test_render_parse_round_trip(entry, rule, graphs):
    again = parse_rule(render_rule(rule))
    assert again.key() == rule.key()
    assert invert_rule(invert_rule(rule)).key() == rule.key()


@pytest.mark.parametrize("entry,rule,graphs", corpus(), ids=lambda x: x["name"] if isinstance(x, dict) else "")
def test_rule_automorphisms_match_brute_force(entry, rule, graphs):
    assert set(rule_automorphisms(rule)) == set(rule_automorphisms_bf(rule))


def test_parallel_edge_condition():
    r = bond_rule()
    cc = ethane_core()
    assert not check_valid(r, cc, (0, 1))
    assert check_valid(r, cc, [0, None])
    with pytest.raises(InvalidMatch):
        apply_flat(r, cc, (0, 1))


def test_bond_rule_on_two_carbons():
    r = bond_rule()
    out = apply(r, UnionGraph((carbon(), carbon())), ((0, (0,)), (1, (0,))))
    assert len(out) == 1
    assert out.components[0].edges == {(0, 1): "-"}


def test_apply_requires_proper_match():
    r = identity_rule("one", ["C"])
    with pytest.raises(InvalidMatch):
        apply(r, UnionGraph((carbon(), carbon())), ((0, (0,)),))


def test_dangling_condition():
    r = parse_rule(DELETE_LEAF)
    assert r.L.labels == ("H", "C")  # vertices in file order
    m = methane()
    assert check_valid(r, m, (1, 0))
    ch2 = LabeledGraph(["C", "H", "C"], [(0, 1, "-"), (1, 2, "-")])  # H with two neighbors
    assert not check_valid(r, ch2, (1, 0))
    H = apply_flat(r, m, (2, 0))
    assert H.labels == ("C", "H", "H", "H") and len(H.edges) == 3


def test_products_are_simple_graphs():
    r = parse_rule(RELABEL)
    H = apply_flat(r, LabeledGraph(["C", "O", "C"], [(0, 1, "-"), (1, 2, "-")]), (0, 1))
    assert len(H.edges) == len({tuple(sorted(e)) for e in H.edges})

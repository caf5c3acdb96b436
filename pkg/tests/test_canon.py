import itertools

from hypothesis import given
from hypothesis import strategies as st

from derivgen.canon import (canonical_code, canonical_form, canonical_graph, encode_derivation, is_isomorphic,
                            isomorphism)
from derivgen.graph import LabeledGraph
from derivgen.oracle import brute_force_aut
from derivgen.perm import build_group

from helpers import bond_rule, graph_and_perm, graphs, methane, path, square


def brute_isomorphic(g, h):
    if len(g) != len(h):
        return False
    for p in itertools.permutations(range(len(g))):
        if g.relabel(p) == h:
            return True
    return False


def test_empty_and_single_vertex():
    assert canonical_code(LabeledGraph([])) != canonical_code(LabeledGraph(["C"]))
    assert canonical_form(LabeledGraph(["C"])).generators == ()


def test_known_group_orders():
    assert build_group(4, canonical_form(square()).generators).order() == 8
    assert build_group(5, canonical_form(methane()).generators).order() == 24
    assert build_group(3, canonical_form(path("COC")).generators).order() == 2


def test_labels_distinguish_graphs():
    assert not is_isomorphic(path("COC"), path("CCO"))
    assert not is_isomorphic(path("CC", "-"), path("CC", "="))


@given(graph_and_perm(max_size=8))
def test_code_invariant_under_renumbering(gp):
    g, p = gp
    h = g.relabel(p)
    assert canonical_code(g) == canonical_code(h)
    assert canonical_graph(g) == canonical_graph(h)
    iso = isomorphism(g, h)
    assert g.relabel(iso) == h


@given(graphs(max_size=6, labels="a", edge_labels="x"), graphs(max_size=6, labels="a", edge_labels="x"))
def test_code_equality_matches_brute_force(g, h):
    assert (canonical_code(g) == canonical_code(h)) == brute_isomorphic(g, h)


@given(graphs(max_size=7, labels="ab", edge_labels="x"))
def test_generators_generate_the_full_automorphism_group(g):
    gens = canonical_form(g).generators
    for a in gens:
        assert g.relabel(a) == g
    assert build_group(len(g), gens).order() == len(brute_force_aut(g))


@given(st.permutations(range(4)))
def test_derivation_code_invariant_under_host_renumbering(p):
    rule = bond_rule()
    host = LabeledGraph(["C", "C", "O", "C"], [(0, 2, "-"), (2, 1, "-")])
    m = (0, 3)
    moved = host.relabel(p)
    assert encode_derivation(rule, host, m) == encode_derivation(rule, moved, (p[0], p[3]))


def test_derivation_codes_separate_non_isomorphic_matches():
    rule = bond_rule()
    host = LabeledGraph(["C", "C", "O", "C"], [(0, 2, "-"), (2, 1, "-")])
    # (0, 1) are the two ends of C-O-C; (0, 3) joins an end to the free carbon
    assert encode_derivation(rule, host, (0, 1)) != encode_derivation(rule, host, (0, 3))
    assert encode_derivation(rule, host, (0, 3)) == encode_derivation(rule, host, (1, 3))
    assert encode_derivation(rule, host, (0, 3)) == encode_derivation(rule, host, (3, 0))

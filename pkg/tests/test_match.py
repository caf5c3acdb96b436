from hypothesis import given

from derivgen.match import DuplicateIsomorphicInput, build_database, enumerate_monomorphisms
from derivgen.oracle import all_monomorphisms
from derivgen.rule import component_valid

from helpers import bond_rule, carbon, ethane_core, square_ctx, graphs, identity_rule, methane, square

import pytest


def test_single_vertex_into_square():
    assert len(enumerate_monomorphisms(identity_rule("h", ["h"]).L, square())) == 4


def test_carbon_into_bonded_pair():
    rule = bond_rule()
    comp = rule.left.components[1]
    cc = ethane_core()
    phis = enumerate_monomorphisms(comp, cc)
    assert phis == [(0,), (1,)]
    assert all(component_valid(rule, 1, cc, phi) for phi in phis)


def test_pattern_larger_than_host():
    assert enumerate_monomorphisms(methane(), carbon()) == []


@given(graphs(max_size=4), graphs(max_size=6))
def test_matches_brute_force(pattern, host):
    got = enumerate_monomorphisms(pattern, host)
    assert got == sorted(got)
    assert set(got) == set(all_monomorphisms(pattern, host))
    assert len(got) == len(set(got))


def test_database_prefilter_keeps_locally_minimal():
    rule, gs = square_ctx()
    full = build_database(rule, gs)
    pre = build_database(rule, gs, prefilter=True)
    assert [len(e) for e in full.entries] == [4, 4, 4]
    assert all(len(p) <= len(f) for p, f in zip(pre.entries, full.entries))


def test_database_entries_sorted_by_graph_then_vector():
    rule = bond_rule()
    db = build_database(rule, [carbon(), ethane_core()])
    for entries in db.entries:
        keys = [(db.rank[e.graph], e.vec) for e in entries]
        assert keys == sorted(keys)


def test_isomorphic_inputs_rejected():
    with pytest.raises(DuplicateIsomorphicInput):
        build_database(bond_rule(), [carbon(), carbon()])

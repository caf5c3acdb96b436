"""Acceptance criteria, one test per criterion.

A pass/fail line per criterion is printed at the end of the pytest run (see
``conftest.py``); running this file directly prints the same lines.
"""
from __future__ import annotations

import time
from collections import Counter
from itertools import combinations

import pytest

from derivgen.bench import BinaryStrings, BinaryTrees, Formose, generate_grammar, formose_molecules
from derivgen.canon import canonical_form, encode_derivation
from derivgen.ede import EnumerationMode, Enumerator, enumerate_derivations
from derivgen.graph import LabeledGraph, UnionGraph
from derivgen.network import ORACLE, ExpansionPolicy, ReactionNetwork, expand
from derivgen.oracle import all_monomorphisms, brute_force_aut, brute_force_derivations, is_valid_total
from derivgen.perm import build_group, pointwise_stabilizer
from derivgen.rule import check_valid, parse_rule

from helpers import bond_rule, carbon, corpus, ethane_core, square_ctx, methane, square

MODES = (EnumerationMode.EDE, EnumerationMode.EDE_S, EnumerationMode.EDE_SS)
CORPUS = corpus()
TREE_BUDGET_S = 300.0


@pytest.fixture(scope="module")
def oracle():
    return {e["name"]: brute_force_derivations(gs, r) for e, r, gs in CORPUS}


def test_criterion_1_raw_derivations_match_oracle(oracle):
    """EDE stream equals the oracle's order-sensitive derivation multiset on the corpus."""
    names = [e["name"] for e, _, _ in CORPUS]
    assert len(CORPUS) >= 30
    assert {"bond-isolated", "bond-bonded", "square_ctx", "square_mixed"} <= set(names)
    t0 = time.monotonic()
    for e, rule, gs in CORPUS:
        assert rule.k <= 3 and len(gs) <= 3 and all(len(g) <= 8 for g in gs)
        res = brute_force_derivations(gs, rule)
        got = Counter(d.order_key() for d in enumerate_derivations(gs, rule, EnumerationMode.EDE))
        assert got == Counter(res.raw_derivations), e["name"]
        assert len(res.derivations) == e["derivations"]
    assert time.monotonic() - t0 < 60


def test_criterion_2_distinct_derivations_match_oracle(oracle):
    """Distinct derivation codes of every mode equal the oracle's isomorphism classes."""
    for e, rule, gs in CORPUS:
        res = oracle[e["name"]]
        expected = {encode_derivation(rule, d.host, d.match) for d in res.representatives}
        assert len(expected) == len(res.classes) == e["classes"]
        for mode in MODES:
            assert {d.code for d in enumerate_derivations(gs, rule, mode)} == expected, (e["name"], mode)


def _yield_sets(graphs, rule, new):
    return {m: {d.order_key() for d in Enumerator(graphs, rule, m, new=new).run()} for m in MODES}


def _molecules_after(grammar, iterations):
    if iterations == 0:
        return {canonical_form(x).hex: x for x in grammar.initial}
    policy = ExpansionPolicy(mode=EnumerationMode.EDE_SS, max_iterations=iterations)
    return expand(grammar.initial, grammar.rules, policy).molecules


def test_criterion_3_pruning_containment():
    """EDE-S yields lie in EDE-SS yields, which lie in EDE yields; strict on binary trees."""
    for e, rule, gs in CORPUS:
        s = _yield_sets(gs, rule, None)
        assert s[EnumerationMode.EDE_S] <= s[EnumerationMode.EDE_SS] <= s[EnumerationMode.EDE], e["name"]
    g = generate_grammar(BinaryTrees(3))
    (rule,) = g.rules
    strict = []
    for it in range(1, 4):
        # the same molecules and new-marks each mode would see in this iteration
        mols = _molecules_after(g, it - 1)
        older = _molecules_after(g, it - 2) if it > 1 else {}
        codes = sorted(mols)
        s = _yield_sets([mols[c] for c in codes], rule, [c not in older for c in codes])
        lo, mid, hi = s[EnumerationMode.EDE_S], s[EnumerationMode.EDE_SS], s[EnumerationMode.EDE]
        assert lo <= mid <= hi
        strict.append(lo < mid < hi)
    assert any(strict)


STRING_TARGETS = {2: (254, 252), 3: (170, 168), 4: (146, 144)}


@pytest.mark.parametrize("k", sorted(STRING_TARGETS))
def test_criterion_4_binary_strings(k):
    """chain(k) networks have the expected size and every mode yields exactly one derivation per reaction."""
    g = generate_grammar(BinaryStrings(k, 7))
    t0 = time.monotonic()
    for mode in MODES:
        net = expand(g.initial, g.rules, g.policy(mode))
        assert (len(net.molecules), len(net.reactions)) == STRING_TARGETS[k]
        assert net.total_yields == len(net.reactions)
    assert time.monotonic() - t0 < 120


# frozen from the oracle-checked build; index i is iteration i + 1
TREE_YIELDS = {
    EnumerationMode.EDE_SS: [2, 4, 10, 25, 60, 143, 340, 810],
    EnumerationMode.EDE_S: [1, 4, 10, 25, 60, 143, 340, 810],
}
TREE_MOLECULES = [3, 6, 11, 23, 46, 98, 207, 451]


@pytest.fixture(scope="module")
def tree_runs():
    """Per mode: the network, the wall time and the network content after iteration 6."""
    out = {}
    for mode, iterations in ((EnumerationMode.EDE_SS, 8), (EnumerationMode.EDE_S, 8), (EnumerationMode.EDE, 6)):
        g = generate_grammar(BinaryTrees(iterations))
        net = ReactionNetwork()
        snap = {}

        def progress(stats, net=net, snap=snap):
            if stats.iteration == 6:
                snap[6] = net.content()

        t0 = time.monotonic()
        expand(g.initial, g.rules, g.policy(mode, TREE_BUDGET_S), net=net, progress=progress)
        out[mode] = (net, time.monotonic() - t0, snap.get(6))
    return out


def test_criterion_5_binary_trees(tree_runs):
    """Modes agree through iteration 6, EDE-SS reaches 8 iterations in budget, EDE-SS/EDE-S yield ratio at least 2."""
    ss, ss_time, ss6 = tree_runs[EnumerationMode.EDE_SS]
    s, _, s6 = tree_runs[EnumerationMode.EDE_S]
    plain, _, plain6 = tree_runs[EnumerationMode.EDE]
    assert plain6 is not None and ss6 == s6 == plain6
    assert len(ss.stats) >= 8 and ss_time <= TREE_BUDGET_S
    assert [x.yields for x in ss.stats] == TREE_YIELDS[EnumerationMode.EDE_SS]
    assert [x.molecules for x in ss.stats] == TREE_MOLECULES
    deepest = min(len(ss.stats), len(s.stats))
    assert [x.yields for x in s.stats] == TREE_YIELDS[EnumerationMode.EDE_S][:len(s.stats)]
    ratio = ss.stats[deepest - 1].yields / s.stats[deepest - 1].yields
    assert ratio >= 2, f"EDE-SS/EDE-S yield ratio at iteration {deepest} is {ratio:.2f}"


def test_criterion_6_formose():
    """Formose networks agree across modes, grow with the carbon cap and match oracle-driven expansion for small caps."""
    sizes = []
    for n in range(1, 6):
        g = generate_grammar(Formose(n))
        nets = [expand(g.initial, g.rules, g.policy(m)) for m in MODES]
        assert len({net.content() for net in nets}) == 1, n
        assert all(net.complete for net in nets)
        sizes.append((len(nets[0].molecules), len(nets[0].reactions)))
        if n <= 3:
            assert expand(g.initial, g.rules, g.policy(ORACLE)).content() == nets[0].content()
    assert all(a[0] <= b[0] and a[1] <= b[1] for a, b in zip(sizes, sizes[1:]))


def test_criterion_7_incompleteness():
    """On the context-only rule over the h-labelled square, EDE-S yields two matches with the same derivation code."""
    rule, gs = square_ctx()
    codes = Counter(d.code for d in enumerate_derivations(gs, rule, EnumerationMode.EDE_S))
    assert max(codes.values()) >= 2


def _test_graphs():
    gs = [square(), methane(), carbon(), ethane_core()] + formose_molecules()
    for _, _, graphs in CORPUS:
        gs += graphs
    return [g for g in gs if len(g) <= 9]


def test_criterion_8_groups():
    """Automorphism group orders and pointwise stabilizers agree with brute force."""
    for g, order in ((square(), 8), (methane(), 24)):
        assert build_group(len(g), canonical_form(g).generators).order() == order
        assert len(brute_force_aut(g)) == order
    for g in _test_graphs():
        auts = brute_force_aut(g)
        group = build_group(len(g), canonical_form(g).generators)
        assert set(group.elements()[0]) == auts
        for size in (1, 2):
            for pts in combinations(range(len(g)), size):
                expected = {a for a in auts if all(a[p] == p for p in pts)}
                assert set(pointwise_stabilizer(group, pts).elements()[0]) == expected


DELETE_LEAF = parse_rule('rule [ ruleID "delete-leaf" left [ node [ id 1 label "H" ] '
                         'edge [ source 0 target 1 label "-" ] ] context [ node [ id 0 label "C" ] ] ]')
DELETE_CARBON = parse_rule('rule [ ruleID "delete-carbon" left [ node [ id 0 label "C" ] ] ]')
MERGE = parse_rule('rule [ ruleID "bond-and-drop" left [ node [ id 2 label "H" ] '
                   'edge [ source 1 target 2 label "-" ] ] context [ node [ id 0 label "C" ] '
                   'node [ id 1 label "C" ] ] right [ edge [ source 0 target 1 label "-" ] ] ]')


def _validity_fixtures():
    bridged = LabeledGraph(["C", "H", "C"], [(0, 1, "-"), (1, 2, "-")])
    ch = LabeledGraph(["C", "H"], [(0, 1, "-")])
    return [
        (bond_rule(), [carbon(), carbon()]),
        (bond_rule(), [ethane_core()]),
        (bond_rule(), [carbon(), ethane_core()]),
        (DELETE_LEAF, [methane()]),
        (DELETE_LEAF, [bridged]),
        (DELETE_CARBON, [carbon()]),
        (DELETE_CARBON, [ethane_core()]),
        (DELETE_CARBON, [methane()]),
        (MERGE, [ch, carbon()]),
        (MERGE, [LabeledGraph(["C", "C", "H"], [(0, 1, "-"), (1, 2, "-")])]),
    ]


def test_criterion_9_validity():
    """Dangling and parallel-edge conditions reject exactly the invalid matches; products are simple."""
    for rule, comps in _validity_fixtures():
        host = UnionGraph(tuple(comps))
        flat = host.flatten()
        maps = all_monomorphisms(rule.L, flat)
        sizes = [len(c) for c in comps]
        bounds = [sum(sizes[:i]) for i in range(len(sizes) + 1)]
        proper = [m for m in maps if all(any(bounds[c] <= v < bounds[c + 1] for v in m) for c in range(len(comps)))]
        valid = {m for m in proper if is_valid_total(rule, flat, m)}
        assert {m for m in proper if check_valid(rule, flat, m)} == valid
        # the engine over this exact host: every component used once
        uniq = {canonical_form(c).hex: c for c in comps}
        graphs = list(uniq.values())
        want = Counter(canonical_form(c).hex for c in comps)
        engine = [d for d in enumerate_derivations(graphs, rule)
                  if Counter(canonical_form(graphs[i]).hex for i in d.graph_ids) == want]
        oracle = [d for d in brute_force_derivations(graphs, rule).derivations
                  if Counter(canonical_form(graphs[i]).hex for i in d.host_ids) == want]
        assert len(engine) == len(oracle)
        assert (len(valid) > 0) == (len(engine) > 0)
        for d in engine:
            for comp in d.result.components:
                assert all(u != v for u, v in comp.edges)
                assert len(comp.edges) == len({frozenset(e) for e in comp.edges})


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))

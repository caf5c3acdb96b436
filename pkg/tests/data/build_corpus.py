"""Regenerate ``corpus.json``: the small (rule, graphs) instances checked against the oracle.

Hand-built instances come first, then seeded random ones. Each entry stores
the rule and graphs as GML together with the oracle's raw derivation count
and class count, which the tests treat as frozen values.

    python3 tests/data/build_corpus.py
"""
from __future__ import annotations

import json
import random
from pathlib import Path

from derivgen.canon import canonical_code
from derivgen.graph import LabeledGraph, disjoint_union, render_graph
from derivgen.oracle import OracleBudget, brute_force_derivations
from derivgen.rule import Rule, parse_rule, render_rule

OUT = Path(__file__).with_name("corpus.json")
MAX_VERTICES = 8


def ctx_rule(name, labels, edges=()):
    """Identity rule on a given left graph."""
    g = LabeledGraph(labels, edges)
    ids = range(len(labels))
    return Rule(name, g, g, g, ids, ids)


def hand_built():
    C = LabeledGraph(["C"])
    CC = LabeledGraph(["C", "C"], [(0, 1, "-")])
    bond = parse_rule('rule [ ruleID "bond" context [ node [ id 0 label "C" ] node [ id 1 label "C" ] ]'
                      ' right [ edge [ source 0 target 1 label "-" ] ] ]')
    square = LabeledGraph(["h"] * 4, [(0, 1, "-"), (2, 3, "-"), (0, 2, "-"), (1, 3, "-")])
    mixed = LabeledGraph(["h", "h", "f", "f"], [(0, 1, "-"), (2, 3, "-"), (0, 2, "-"), (1, 3, "-")])
    delete_leaf = parse_rule('rule [ ruleID "delete-leaf" left [ node [ id 1 label "H" ]'
                             ' edge [ source 0 target 1 label "-" ] ] context [ node [ id 0 label "C" ] ] ]')
    delete_vertex = parse_rule('rule [ ruleID "delete-vertex" left [ node [ id 0 label "C" ] ] ]')
    methane = LabeledGraph(["C", "H", "H", "H", "H"], [(0, i, "-") for i in range(1, 5)])
    ethane_like = LabeledGraph(["C", "C", "H", "H"], [(0, 1, "-"), (0, 2, "-"), (1, 3, "-")])
    return [
        ("bond-isolated", bond, [C]),
        ("bond-bonded", bond, [CC]),
        ("bond-both", bond, [C, CC]),
        ("square_ctx", ctx_rule("square_ctx", ["h"] * 3), [square]),
        ("square_mixed", ctx_rule("square_mixed", ["h", "h", "f"], [(0, 1, "-")]), [mixed]),
        ("dangling-vertex", delete_vertex, [C, CC]),
        ("dangling-leaf", delete_leaf, [methane, ethane_like]),
        ("methane-pair", ctx_rule("two-h", ["H", "H"]), [methane]),
    ]


def rand_conn(rng, n, vl, el, p):
    while True:
        es = [(u, v, rng.choice(el)) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        g = LabeledGraph([rng.choice(vl) for _ in range(n)], es)
        if g.is_connected():
            return g


def rand_rule(rng, name):
    k = rng.randint(1, 3)
    parts = [rand_conn(rng, rng.randint(1, 3), "ab", "xy", 0.7) for _ in range(k)]
    if k > 1 and rng.random() < 0.5:
        parts = [parts[0]] * k  # rule-isomorphic components
    L = disjoint_union(parts)
    keep = [v for v in range(len(L)) if rng.random() < 0.8] or [0]
    pos = {v: i for i, v in enumerate(keep)}
    K = LabeledGraph([L.labels[v] for v in keep],
                     [(pos[a], pos[b], lab) for (a, b), lab in L.edges.items()
                      if a in pos and b in pos and rng.random() < 0.85])
    labels = [lab if rng.random() < 0.85 else rng.choice("ab") for lab in K.labels]
    edges = {e: (lab if rng.random() < 0.85 else rng.choice("xy")) for e, lab in K.edges.items()}
    if rng.random() < 0.3:
        labels.append(rng.choice("ab"))
    for a in range(len(labels)):
        for b in range(a + 1, len(labels)):
            if (a, b) not in edges and rng.random() < 0.2:
                edges[(a, b)] = rng.choice("xy")
    R = LabeledGraph(labels, [(a, b, lab) for (a, b), lab in edges.items()])
    return Rule(name, L, K, R, keep, range(len(keep)))


def rand_host(rng):
    n = rng.randint(1, 6)
    kind = rng.choice(["cycle", "star", "complete", "random"])
    if kind == "cycle" and n >= 3:
        return LabeledGraph(["a"] * n, [(i, (i + 1) % n, "x") for i in range(n)])
    if kind == "star":
        return LabeledGraph(["a"] + [rng.choice("ab")] * (n - 1), [(0, i, "x") for i in range(1, n)])
    if kind == "complete":
        return LabeledGraph(["a"] * n, [(i, j, "x") for i in range(n) for j in range(i + 1, n)])
    return rand_conn(rng, n, "ab", "xy", 0.5)


def random_instances(count, seed=20241019):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        rule = rand_rule(rng, f"random-{len(out)}")
        graphs, codes = [], set()
        for _ in range(rng.randint(1, 3)):
            g = rand_host(rng)
            c = canonical_code(g)
            if c not in codes:
                codes.add(c)
                graphs.append(g)
        try:
            res = brute_force_derivations(graphs, rule, OracleBudget(max_maps=20_000))
        except Exception:
            continue
        if res.derivations:  # keep only instances with something to enumerate
            out.append((rule.name, rule, graphs))
    return out


def main():
    entries = []
    for name, rule, graphs in hand_built() + random_instances(32):
        assert rule.k <= 3 and len(graphs) <= 3 and all(len(g) <= MAX_VERTICES for g in graphs)
        text = render_rule(rule)
        rule = parse_rule(text)
        res = brute_force_derivations(graphs, rule)
        entries.append({"name": name, "rule": text, "graphs": [render_graph(g) for g in graphs],
                        "derivations": len(res.derivations), "classes": len(res.classes)})
    OUT.write_text(json.dumps(entries, indent=1) + "\n", encoding="utf-8")
    print(f"{len(entries)} instances written to {OUT}")


if __name__ == "__main__":
    main()

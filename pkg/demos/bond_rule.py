"""Apply a bond-forming rule and watch the parallel-edge condition at work.

Two isolated carbons in the context get a new edge on the right. Over a
single free carbon the rule joins two copies; over an existing C-C pair the
only matches inside that pair are rejected because the edge already exists.

    python3 demos/bond_rule.py
"""
from derivgen import LabeledGraph, brute_force_derivations, enumerate_derivations, parse_rule

BOND = parse_rule("""rule [
  ruleID "bond"
  context [ node [ id 0 label "C" ] node [ id 1 label "C" ] ]
  right [ edge [ source 0 target 1 label "-" ] ]
]""")

carbon = LabeledGraph(["C"], name="C")
pair = LabeledGraph(["C", "C"], [(0, 1, "-")], name="C-C")

for inputs in ([carbon], [pair], [carbon, pair]):
    names = ", ".join(g.name for g in inputs)
    derivations = list(enumerate_derivations(inputs, BOND))
    print(f"inputs {{{names}}}: {len(derivations)} derivations, "
          f"{len({d.code for d in derivations})} up to isomorphism")
    for d in derivations:
        host = " + ".join(inputs[i].name for i in d.graph_ids)
        products = ", ".join(f"{len(c)} vertices/{len(c.edges)} edges" for c in d.result.components)
        print(f"  {host:12s} -> {products}")

# the oracle sees the same thing by exhaustive search
res = brute_force_derivations([pair], BOND)
inside = [d for d in res.derivations if d.host_ids == (0,)]
print(f"oracle: {len(inside)} valid derivations inside a single C-C pair")

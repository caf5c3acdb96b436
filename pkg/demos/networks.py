"""Grow reaction networks for the three benchmark grammars.

Binary strings have no symmetry, so every mode computes exactly one
derivation per reaction. Formose runs to a carbon cap; the network is also
written as JSON and DOT next to this script's output directory argument.

    python3 demos/networks.py [OUTDIR]
"""
import sys
from pathlib import Path

from derivgen import EnumerationMode, expand, export_dot, export_json
from derivgen.bench import BinaryStrings, BinaryTrees, Formose, generate_grammar

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else None

for spec in (BinaryStrings(2), BinaryStrings(3), BinaryTrees(5), Formose(4)):
    g = generate_grammar(spec)
    print(spec.label)
    for mode in EnumerationMode:
        net = expand(g.initial, g.rules, g.policy(mode, wall_clock_limit=60))
        per_iteration = " ".join(str(s.yields) for s in net.stats)
        print(f"  {mode.value:7s} molecules {len(net.molecules):4d} reactions {len(net.reactions):4d} "
              f"yields per iteration: {per_iteration}")
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = spec.label.replace(":", "-")
        (out_dir / f"{stem}.json").write_bytes(export_json(net))
        (out_dir / f"{stem}.dot").write_bytes(export_dot(net))

"""Command-line entry point.

Exit codes: 0 success, 1 internal error, 2 usage or input error,
3 partial result after a timeout, 4 partial result after a limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .bench import GrammarError, parse_grammar, run_benchmark, to_csv, to_json
from .canon import canonical_form, encode_derivation, is_isomorphic
from .ede import EnumerationMode, enumerate_derivations
from .graph import GraphError, LabeledGraph, read_graph
from .network import ExpansionPolicy, default_jobs, expand, export_dot, export_json
from .oracle import BudgetExceeded, brute_force_derivations
from .perm import build_group
from .rule import apply_flat, read_rule

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_TIMEOUT, EXIT_LIMIT = 0, 1, 2, 3, 4

MODES = ("ede", "ede-s", "ede-ss")


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _label_cap(text: str) -> tuple[str, int]:
    lab, sep, num = text.rpartition("=")
    if not sep or not lab:
        raise argparse.ArgumentTypeError(f"expected LABEL=N, got {text!r}")
    try:
        n = int(num)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LABEL=N, got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("label caps must be nonnegative")
    return lab, n


def _mode_list(text: str) -> list[str]:
    out = [m.strip() for m in text.split(",") if m.strip()]
    for m in out:
        if m not in MODES:
            raise argparse.ArgumentTypeError(f"unknown mode {m!r}")
    if not out:
        raise argparse.ArgumentTypeError("no modes given")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="derivgen", description="DPO rule application and derivation enumeration.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", type=Path, help="key=value file with defaults for the subcommand flags")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("canon", help="canonical code and automorphism generators of a graph")
    c.add_argument("graph", type=Path)

    i = sub.add_parser("iso", help="exit 0 if the two graphs are isomorphic, 1 otherwise")
    i.add_argument("graph1", type=Path)
    i.add_argument("graph2", type=Path)

    d = sub.add_parser("derive", help="stream the derivations of one rule as JSON lines")
    d.add_argument("--rule", type=Path, required=True)
    d.add_argument("--graphs", type=Path, nargs="+", required=True)
    d.add_argument("--mode", choices=MODES + ("oracle",), default="ede")
    d.add_argument("--host", action="store_true",
                   help="treat the graphs as one fixed host: each is used exactly once")
    d.add_argument("--distinct", action="store_true", help="print one derivation per isomorphism class")
    d.add_argument("--result", action="store_true", help="include the result graph")

    e = sub.add_parser("expand", help="grow a reaction network")
    e.add_argument("--rules", type=Path, nargs="+", default=[])
    e.add_argument("--graphs", type=Path, nargs="+", required=True)
    e.add_argument("--mode", choices=MODES, default="ede-ss")
    e.add_argument("--max-iter", type=_positive_int)
    e.add_argument("--max-vertices", type=_positive_int)
    e.add_argument("--max-label", type=_label_cap, action="append", default=[])
    e.add_argument("--timeout-s", type=_positive_float)
    e.add_argument("--jobs", type=_positive_int, default=None)
    e.add_argument("--out", type=Path, required=True)
    e.add_argument("--dot", type=Path)

    b = sub.add_parser("bench", help="run a benchmark grammar in several modes")
    b.add_argument("--grammar", required=True, help="strings:K[:UNITS], trees[:ITERATIONS] or formose:N")
    b.add_argument("--modes", type=_mode_list, default=list(MODES))
    b.add_argument("--timeout-s", type=_positive_float)
    b.add_argument("--jobs", type=_positive_int, default=None)
    b.add_argument("--out", type=Path, required=True, help="CSV output")
    b.add_argument("--json", type=Path, help="JSON output")
    return p


def read_config(path: Path) -> dict[str, str]:
    out = {}
    for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{n}: expected key=value")
        out[key.strip().replace("_", "-")] = value.strip()
    return out


def apply_config(parser: argparse.ArgumentParser, command: str, config: dict[str, str]) -> None:
    """Turn config entries into defaults of the chosen subcommand, validated like flags."""
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    by_flag = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                by_flag[opt[2:]] = action
    for key, value in config.items():
        action = by_flag.get(key)
        if action is None:
            raise UsageError(f"unknown config key {key!r} for {command}")
        conv = action.type or (lambda s: s)
        try:
            if isinstance(action, argparse._StoreTrueAction):
                val = value.lower() in ("1", "true", "yes", "on")
            elif isinstance(action, argparse._AppendAction):
                val = [conv(v) for v in value.split(",") if v.strip()]
            elif action.nargs in ("+", "*"):
                val = [conv(v) for v in value.split()]
            else:
                val = conv(value)
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and val not in action.choices:
            raise UsageError(f"config key {key!r}: invalid choice {val!r}")
        action.default = val
        action.required = False


# --- subcommands -----------------------------------------------------------------

def cmd_canon(args, out) -> int:
    g = read_graph(args.graph)
    c = canonical_form(g)
    group = build_group(len(g), c.generators)
    out.write(f"code {c.hex}\n")
    out.write(f"aut_order {group.order()}\n")
    for gen in c.generators:
        out.write("generator " + " ".join(map(str, gen)) + "\n")
    return EXIT_OK


def cmd_iso(args, out) -> int:
    same = is_isomorphic(read_graph(args.graph1), read_graph(args.graph2))
    out.write("isomorphic\n" if same else "not isomorphic\n")
    return EXIT_OK if same else 1


def _dedupe(graphs: list[LabeledGraph]) -> tuple[list[LabeledGraph], Counter]:
    """Distinct graphs up to isomorphism and how often each occurs."""
    uniq: list[LabeledGraph] = []
    codes: dict[bytes, int] = {}
    counts: Counter = Counter()
    for g in graphs:
        code = canonical_form(g).code
        if code not in codes:
            codes[code] = len(uniq)
            uniq.append(g)
        counts[codes[code]] += 1
    return uniq, counts


def cmd_derive(args, out) -> int:
    rule = read_rule(args.rule)
    graphs = [read_graph(p) for p in args.graphs]
    for g in graphs:
        if len(g) == 0 or not g.is_connected():
            raise UsageError(f"graph {g.name!r} must be non-empty and connected")
    uniq, counts = _dedupe(graphs)
    if not args.host and len(uniq) != len(graphs):
        raise UsageError("input graphs must be pairwise non-isomorphic (use --host for a fixed host)")

    def wanted(ids) -> bool:
        return not args.host or Counter(ids) == counts

    seen = set()
    if args.mode == "oracle":
        result = brute_force_derivations(uniq, rule)
        cls = {}
        for n, members in enumerate(result.classes):
            for idx in members:
                cls[idx] = n
        for idx, d in enumerate(result.derivations):
            ids, slots = d.order_key()
            if not wanted(ids):
                continue
            code = encode_derivation(rule, d.host, d.match).hex()
            if args.distinct and code in seen:
                continue
            seen.add(code)
            rec = {"rule": rule.name, "host": [uniq[i].name or i for i in ids],
                   "match": [[x, list(phi)] for x, phi in slots], "code": code, "class": cls[idx]}
            if args.result:
                rec["result"] = _graph_json(apply_flat(rule, d.host, d.match))
            out.write(json.dumps(rec, sort_keys=True) + "\n")
        return EXIT_OK
    for d in enumerate_derivations(uniq, rule, args.mode):
        if not wanted(d.graph_ids):
            continue
        rec = d.to_json()
        if args.distinct:
            if rec["code"] in seen:
                continue
            seen.add(rec["code"])
        rec["host"] = [uniq[i].name or i for i in d.graph_ids]
        if args.result:
            rec["result"] = _graph_json(d.result.flatten())
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


def _graph_json(g: LabeledGraph) -> dict:
    return {"labels": list(g.labels), "edges": [[u, v, lab] for u, v, lab in g.edge_list()]}


def cmd_expand(args, out) -> int:
    rules = [read_rule(p) for p in args.rules]
    names = [r.name for r in rules]
    if len(set(names)) != len(names):
        raise UsageError("rule names must be unique")
    graphs = [read_graph(p) for p in args.graphs]
    policy = ExpansionPolicy(mode=EnumerationMode.parse(args.mode), max_iterations=args.max_iter,
                             max_product_vertices=args.max_vertices, max_label_count=tuple(args.max_label),
                             wall_clock_limit=args.timeout_s, jobs=args.jobs or default_jobs())
    net = expand(graphs, rules, policy)
    args.out.write_bytes(export_json(net))
    if args.dot:
        args.dot.write_bytes(export_dot(net))
    out.write(f"molecules {len(net.molecules)} reactions {len(net.reactions)} "
              f"iterations {len(net.stats)} status {'timeout' if net.timed_out else 'limit' if net.limit_reached else 'complete'}\n")
    return net.exit_code()


def cmd_bench(args, out) -> int:
    try:
        spec = parse_grammar(args.grammar)
    except GrammarError as exc:
        raise UsageError(str(exc)) from None
    runs = run_benchmark(spec, args.modes, timeout=args.timeout_s, jobs=args.jobs or default_jobs())
    args.out.write_text(to_csv(runs), encoding="utf-8")
    if args.json:
        args.json.write_text(to_json(runs), encoding="utf-8")
    for r in runs:
        net = r.network
        out.write(f"{r.grammar} {r.mode} molecules {len(net.molecules)} reactions {len(net.reactions)} "
                  f"yields {net.total_yields}{' timeout' if r.timed_out else ''}\n")
    return EXIT_TIMEOUT if any(r.timed_out for r in runs) else EXIT_OK


COMMANDS = {"canon": cmd_canon, "iso": cmd_iso, "derive": cmd_derive, "expand": cmd_expand, "bench": cmd_bench}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, rest = pre.parse_known_args(argv)
    try:
        if known.config is not None:
            command = next((a for a in rest if a in COMMANDS), None)
            if command is not None:
                apply_config(parser, command, read_config(known.config))
    except (UsageError, OSError) as exc:
        sys.stderr.write(f"derivgen: {exc}\n")
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, GraphError, OSError, BudgetExceeded) as exc:
        sys.stderr.write(f"derivgen: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"derivgen: internal error: {exc!r}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

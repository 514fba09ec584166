"""Command-line front end: ``bnmdl {simulate,explode,recover,discretize,bench}``.

Human-readable tables go to stdout; ``--out`` receives the machine output
(CSV for simulate/explode, JSON for the reports).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import run_bench
from .dataset import (DiscreteDataset, explode, load_bnspec, load_csv, load_explosion, relabel, sample)
from .discretization import DiscretizationReport, cycle_discretize
from .errors import BnMdlError, TooLarge
from .graph import MAX_ENUMERATION_NODES, enumerate_dags, parse_edge_list
from .scoring import CRITERIA, recover


def _load_data(path):
    raw = load_csv(path)
    return relabel(raw)


def _load_discrete(path) -> DiscreteDataset:
    """Read a CSV whose cells are already integer codes 1..card."""
    raw = load_csv(path)
    vals = raw.rows.astype(int)
    if (vals != raw.rows).any() or (vals < 1).any():
        raise BnMdlError("%s: expected integer codes >= 1" % path)
    return DiscreteDataset(vals, tuple(int(c) for c in vals.max(axis=0)), raw.names)


def _emit(text, out_text, out_path):
    print(text)
    if out_path:
        Path(out_path).write_text(out_text)


def cmd_simulate(args):
    spec = load_bnspec(args.spec)
    data = sample(spec, args.m, args.seed)
    text = data.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print("simulated m=%d rows, n=%d nodes, cardinalities=%s" % (data.m, data.n, list(data.cardinalities)),
          file=sys.stderr)


def cmd_explode(args):
    data = _load_discrete(args.data)
    expl = load_explosion(args.explosion)
    out = explode(data, expl, args.seed)
    text = out.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print("exploded node %d into %d values" % (expl.node, expl.new_cardinality), file=sys.stderr)


def cmd_recover(args):
    data, _ = _load_data(args.data)
    if data.n > MAX_ENUMERATION_NODES:
        raise TooLarge("recover enumerates every DAG and is capped at %d columns" % MAX_ENUMERATION_NODES)
    report = recover(data, enumerate_dags(data.n), args.criterion)
    _emit(report.to_text(), report.to_json(), args.out)


def cmd_discretize(args):
    data, maps = _load_data(args.data)
    dag = parse_edge_list(Path(args.graph).read_text(), n=data.n)
    nodes = args.node or []
    if not nodes:
        raise BnMdlError("discretize needs --node")
    for v in nodes:
        if not 1 <= v <= data.n:
            raise BnMdlError("node %d out of range 1..%d" % (v, data.n))
    if args.cycle:
        res = cycle_discretize(data, dag, nodes, args.max_passes)
        lines = ["node %d: %s" % (v, p.to_bar()) for v, p in sorted(res.policies.items())]
        lines.append("passes: %d, converged: %s" % (res.passes, str(res.converged).lower()))
        doc = {"policies": [p.to_dict() for _, p in sorted(res.policies.items())],
               "passes": res.passes, "converged": res.converged}
        _emit("\n".join(lines), json.dumps(doc, indent=2), args.out)
        return
    if len(nodes) != 1:
        raise BnMdlError("give exactly one --node unless --cycle is set")
    node = nodes[0]
    report = DiscretizationReport.build(data, dag, node, exhaustive=args.exhaustive,
                                        value_map=maps[node - 1])
    _emit(report.to_text(), report.to_json(), args.out)


def cmd_bench(args):
    sweep = [int(x) for x in args.m1_sweep.split(",") if x.strip()]
    report = run_bench(sweep, reps=args.reps, seed=args.seed, m=args.m)
    _emit(report.to_text(), report.to_json(), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bnmdl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="forward-sample a network given as BnSpec JSON")
    p.add_argument("--spec", required=True)
    p.add_argument("--m", type=int, required=True, help="number of rows")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("explode", help="explode one column of an integer-coded CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--explosion", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_explode)

    p = sub.add_parser("recover", help="score every DAG on the CSV's columns")
    p.add_argument("--data", required=True)
    p.add_argument("--criterion", choices=CRITERIA, default="mdl")
    p.add_argument("--seed", type=int, help="accepted for uniformity; scoring is deterministic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("discretize", help="top-down MDL discretization of one node")
    p.add_argument("--data", required=True)
    p.add_argument("--graph", required=True, help="edge list, one 'parent child' pair per line")
    p.add_argument("--node", type=int, action="append", help="node to discretize (repeat with --cycle)")
    p.add_argument("--exhaustive", action="store_true", help="also run the exhaustive oracle")
    p.add_argument("--cycle", action="store_true", help="cycle over all --node values")
    p.add_argument("--max-passes", type=int, default=10)
    p.add_argument("--seed", type=int, help="accepted for uniformity; search is deterministic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("bench", help="top-down vs exhaustive on random exploded instances")
    p.add_argument("--m1-sweep", default="2,4,6,8,10,12")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=100_000, help="nominal sample size")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (BnMdlError, OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

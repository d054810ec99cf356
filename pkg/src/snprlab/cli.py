"""Command-line surface for batch runs over network files.

Each subcommand parses its inputs, calls one library operation, and prints
a deterministic text report: identical flags and inputs give byte-identical
output. The SNPRLAB_LOG environment variable turns on stderr diagnostics
and never changes what is written to stdout or --out.
"""

import argparse
import os
import sys
from fractions import Fraction

from .errors import BudgetExceededError, SnprLabError
from .netcore import (
    enumerate_tree_child,
    isomorphic,
    random_network,
    random_tree_child,
    tree_child_report,
)
from .phyloio import parse_enewick, parse_pnd, write_enewick, write_witness_bundle
from .snpr import dtc, enumerate_moves, moves_from_json, moves_to_json, normalize_sequence
from .agreement import check_bounds, gap_witness_search, maf_rspr, mtc

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BUDGET = 2


def _log(msg):
    if os.environ.get("SNPRLAB_LOG"):
        print("snprlab: %s" % msg, file=sys.stderr)


def _read_network(path, fmt):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SnprLabError("%s: %s" % (path, exc.strerror or exc)) from exc
    try:
        return parse_pnd(text) if fmt == "pnd" else parse_enewick(text)
    except SnprLabError as exc:
        # parser messages carry the position; prepend the file
        raise SnprLabError("%s: %s" % (path, exc)) from exc


def _edge_token(e):
    if e.slot:
        return "%d>%d~%d" % (e.src, e.dst, e.slot)
    return "%d>%d" % (e.src, e.dst)


def _fraction_token(fr):
    # bounds are halves; print "1" or "0.5", never "1/2"
    if isinstance(fr, Fraction) and fr.denominator != 1:
        return "%g" % float(fr)
    return "%d" % fr


def _bool_token(flag):
    return "true" if flag else "false"


# ---------------------------------------------------------------- handlers


def _cmd_validate(args):
    n = _read_network(args.file, args.format)
    lines = [
        "vertices\t%d" % len(n.vertices),
        "edges\t%d" % len(n.edges),
        "leaves\t%d" % len(n.leaves),
        "reticulations\t%d" % n.reticulation_count,
    ]
    return "\n".join(lines) + "\n"


def _cmd_tree_child(args):
    n = _read_network(args.file, args.format)
    rep = tree_child_report(n)
    lines = [
        "tree_child\t%s" % _bool_token(rep.is_tree_child),
        "stacks\t%d" % len(rep.stacks),
        "sibling_reticulations\t%d" % len(rep.sibling_reticulations),
        "parallel_pairs\t%d" % len(rep.parallel_pairs),
    ]
    return "\n".join(lines) + "\n"


def _cmd_iso(args):
    n = _read_network(args.file, args.format)
    m = _read_network(args.other, args.format)
    return _bool_token(isomorphic(n, m)) + "\n"


def _cmd_neighbors(args):
    n = _read_network(args.file, args.format)
    out = []
    for mv, succ in enumerate_moves(n, tree_child_only=args.tree_child_only):
        target = _edge_token(mv.target) if mv.target is not None else "-"
        out.append("%s\t%s\t%s\t%s" % (mv.kind, _edge_token(mv.edge), target,
                                       write_enewick(succ)))
    _log("%d neighbors" % len(out))
    return "".join(line + "\n" for line in out)


def _cmd_distance(args):
    n = _read_network(args.file, args.format)
    m = _read_network(args.other, args.format)
    weight, seq = dtc(n, m, reticulation_cap=args.cap, budget=args.budget,
                      tree_child_only=args.tree_child_only)
    return "%d\n%s\n" % (weight, moves_to_json(seq))


def _cmd_mtc(args):
    n = _read_network(args.file, args.format)
    m = _read_network(args.other, args.format)
    value, witness = mtc(n, m, subset_budget=args.budget)
    return "%d\n%s" % (value, write_witness_bundle(witness))


def _cmd_bounds(args):
    n = _read_network(args.file, args.format)
    m = _read_network(args.other, args.format)
    rep = check_bounds(n, m, cap=args.cap)
    return "%s\t%d\t%d\t%s\n" % (_fraction_token(rep.half_m), rep.d, rep.m,
                                 _bool_token(rep.holds))


def _cmd_maf(args):
    t = _read_network(args.file, args.format)
    u = _read_network(args.other, args.format)
    return "%d\n" % maf_rspr(t, u)


def _cmd_gen(args):
    lines = []
    for i in range(args.count):
        seed = args.seed + i
        if args.tree_child_only:
            n = random_tree_child(args.leaves, args.retics, seed=seed)
        else:
            n = random_network(args.leaves, args.retics, seed=seed)
        lines.append(write_enewick(n))
    return "".join(line + "\n" for line in lines)


def _cmd_enumerate(args):
    try:
        nets = enumerate_tree_child(args.leaves, args.retics)
        return "".join(write_enewick(n) + "\n" for n in nets)
    except ValueError as exc:
        raise SnprLabError(str(exc)) from exc


def _cmd_normalize_seq(args):
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SnprLabError("%s: %s" % (args.file, exc.strerror or exc)) from exc
    seq = moves_from_json(text)
    return moves_to_json(normalize_sequence(seq)) + "\n"


def _cmd_gap_search(args):
    hit = gap_witness_search(args.leaves, args.retics, args.budget,
                             seed=args.seed)
    if hit is None:
        _log("budget exhausted without a witness")
        return ""
    n, m, rep = hit
    return "%s\n%s\n%s\t%d\t%d\t%s\n" % (
        write_enewick(n), write_enewick(m),
        _fraction_token(rep.half_m), rep.d, rep.m, _bool_token(rep.holds))


# ------------------------------------------------------------------ parser


def _build_parser():
    top = argparse.ArgumentParser(
        prog="snprlab",
        description="tree-child networks, shared digraphs, and rearrangement distances")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("enewick", "pnd"),
                        default="enewick", help="input file format")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for any randomized behavior")
    common.add_argument("--cap", type=int, default=None,
                        help="reticulation ceiling for distance searches")
    common.add_argument("--budget", type=int, default=None,
                        help="work budget; exhaustion exits with status 2")
    common.add_argument("--jobs", type=int, default=1,
                        help="parallelism hint; results never depend on it")
    common.add_argument("--tree-child-only", action=argparse.BooleanOptionalAction,
                        default=True, help="stay inside tree-child space")
    common.add_argument("--out", default=None, metavar="PATH",
                        help="write output to PATH instead of stdout")

    sub = top.add_subparsers(dest="subcommand", required=True)

    def add(name, handler, help_text, files=0, extra=None):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if files >= 1:
            p.add_argument("file")
        if files >= 2:
            p.add_argument("other")
        if extra:
            extra(p)
        p.set_defaults(handler=handler)
        return p

    add("validate", _cmd_validate, "parse one network and print its counts", files=1)
    add("tree-child", _cmd_tree_child, "report the tree-child property", files=1)
    add("iso", _cmd_iso, "test two networks for isomorphism", files=2)
    add("neighbors", _cmd_neighbors, "list all one-move successors", files=1)
    add("distance", _cmd_distance, "exact rearrangement distance with witness", files=2)
    add("mtc", _cmd_mtc, "shared-digraph measure with witness bundle", files=2)
    add("bounds", _cmd_bounds, "half-measure, distance, measure as TSV", files=2)
    add("maf", _cmd_maf, "agreement-forest distance for trees", files=2)

    def gen_args(p):
        p.add_argument("--leaves", type=int, required=True)
        p.add_argument("--retics", type=int, default=0)
        p.add_argument("--count", type=int, default=1)

    add("gen", _cmd_gen, "generate random networks, one per line", extra=gen_args)

    def enum_args(p):
        p.add_argument("--leaves", type=int, required=True)
        p.add_argument("--retics", type=int, default=0)

    add("enumerate", _cmd_enumerate, "list all networks at a small size", extra=enum_args)
    add("normalize-seq", _cmd_normalize_seq, "reorder a move sequence into normal form", files=1)

    def gap_args(p):
        p.add_argument("--leaves", type=int, required=True)
        p.add_argument("--retics", type=int, default=1)

    gap = add("gap-search", _cmd_gap_search, "hunt for a pair whose distance beats the lower bound", extra=gap_args)
    gap.set_defaults(budget=200)
    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        output = args.handler(args)
    except BudgetExceededError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except SnprLabError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(output)
        except OSError as exc:
            print("error: %s: %s" % (args.out, exc.strerror or exc), file=sys.stderr)
            return EXIT_INVALID
    else:
        sys.stdout.write(output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

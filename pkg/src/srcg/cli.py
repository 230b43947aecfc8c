"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 size guard exceeded,
3 internal invariant violated.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
from typing import List, Optional, TextIO

from .classifier import (
    ContextTooLarge,
    NotSrcgInput,
    SrgParams,
    classify,
    dual_set,
    enumerate_catalog,
    srcg_test,
)
from .export import (
    CatalogRecord,
    edge_lines,
    read_records,
    record_from_report,
    to_graph6,
    write_records,
)
from .group import DeltaTree, OrbitSubset, UnsupportedSize, delta_tree, nabla_dual, parse_subset
from .homogeneous import build_homogeneous
from .verifier import (
    NotStronglyRegular,
    TooLarge,
    brute_srg_check,
    cayley_adjacency,
    exhaustive_orbit_search,
    exhaustive_symmetric_search,
    params_agree,
    sring_closure_check,
)

THREADS_ENV = "SRCG_THREADS"

EXIT_OK, EXIT_USAGE, EXIT_GUARD, EXIT_INVARIANT = 0, 1, 2, 3

log = logging.getLogger("srcg")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _vector(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}") from None


def _threads(args) -> Optional[int]:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return None


def _add_group(sp):
    sp.add_argument("-p", type=int, required=True, help="prime")
    sp.add_argument("-n", type=int, required=True, help="exponent")


def _add_subset(sp, required=True):
    g = sp.add_mutually_exclusive_group(required=required)
    g.add_argument("--subset", metavar="FILE", help="node descriptors, one per line ('-' for stdin)")
    g.add_argument("--vector", type=_vector, help="homogeneity vector a1,a2,...")
    sp.add_argument("--seed", type=int, help="random realization of --vector")


def _read_subset(tree: DeltaTree, args, stdin: TextIO) -> OrbitSubset:
    if args.vector is not None:
        rng = random.Random(args.seed) if args.seed is not None else None
        return build_homogeneous(tree, args.vector, rng)
    if args.subset == "-":
        return parse_subset(tree, stdin.read().splitlines())
    try:
        with open(args.subset) as fh:
            return parse_subset(tree, fh.read().splitlines())
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _record(tree: DeltaTree, s: OrbitSubset) -> CatalogRecord:
    return record_from_report(tree, s, classify(tree, s))


def cmd_tree(args, out, stdin) -> int:
    tree = delta_tree(args.p, args.n)
    for node in tree.nodes:
        father = "-" if node.father is None else tree.descriptor(node.father)
        fields = [str(node.id), node.descriptor, str(node.length), father, f"{node.generator[0]},{node.generator[1]}"]
        if args.duals:
            if node.id == tree.root:
                fields.append("nabla=G")
            else:
                (a, b), (c, d) = nabla_dual(tree, node.id).generating_pair
                fields.append(f"nabla=<({a},{b}),({c},{d})>")
        out.write("\t".join(fields) + "\n")
    return EXIT_OK


def cmd_build(args, out, stdin) -> int:
    tree = delta_tree(args.p, args.n)
    rng = random.Random(args.seed) if args.seed is not None else None
    s = build_homogeneous(tree, args.vector, rng)
    if args.descriptors:
        for d in s.descriptors(tree):
            out.write(d + "\n")
    else:
        write_records([_record(tree, s)], out)
    return EXIT_OK


def cmd_classify(args, out, stdin) -> int:
    tree = delta_tree(args.p, args.n)
    s = _read_subset(tree, args, stdin)
    report = classify(tree, s)
    write_records([record_from_report(tree, s, report)], out)
    if report.witnesses:
        print("# witness classes: " + " ".join(tree.descriptor(k) for k in report.witnesses), file=sys.stderr)
    return EXIT_OK


def cmd_verify(args, out, stdin) -> int:
    tree = delta_tree(args.p, args.n)
    s = _read_subset(tree, args, stdin)
    spectrum = srcg_test(tree, s)
    rows = []
    if spectrum.is_srcg:
        lam = mu = None
        if spectrum.r is not None:
            mu = spectrum.k + spectrum.r * spectrum.s
            lam = mu + spectrum.r + spectrum.s
        rows.append(("characters", True, spectrum.k, lam, mu))
    else:
        rows.append(("characters", False, spectrum.k, None, None))
    try:
        brute = brute_srg_check(cayley_adjacency(tree, s))
        rows.append(("brute", True, brute.k, brute.lam, brute.mu))
    except NotStronglyRegular:
        brute = None
        rows.append(("brute", False, None, None, None))
    closure = sring_closure_check(tree, s)
    rows.append(("closure", closure.ok, closure.alpha, closure.beta, closure.gamma))

    def show(x):
        return "-" if x is None else str(x)

    out.write("oracle\tsrg\tk\tlambda\tmu\n")
    for name, ok, k, lam, mu in rows:
        out.write(f"{name}\t{'yes' if ok else 'no'}\t{show(k)}\t{show(lam)}\t{show(mu)}\n")
    verdicts = {ok for _, ok, *_ in rows}
    agree = len(verdicts) == 1
    if agree and spectrum.is_srcg:
        nu = tree.ctx.order
        triples = [SrgParams(nu, k, lam, mu) for _, _, k, lam, mu in rows]
        agree = all(params_agree(triples[0], t) for t in triples[1:])
    out.write(f"agreement\t{'yes' if agree else 'no'}\n")
    return EXIT_OK if agree else EXIT_INVARIANT


def cmd_search(args, out, stdin) -> int:
    tree = delta_tree(args.p, args.n)
    if args.symmetric:
        result = exhaustive_symmetric_search(args.p, args.n)
        print(
            f"# {result.searched} symmetric subsets over {result.classes} inverse classes,"
            f" {len(result.srcg_sets)} strongly regular",
            file=sys.stderr,
        )
        if not result.all_orbit_unions:
            print(f"# {len(result.non_orbit_unions)} connection sets are not orbit unions", file=sys.stderr)
            return EXIT_INVARIANT
        subsets = sorted((tree.subset_from_elements(es) for es in result.srcg_sets), key=lambda x: x.mask)
    else:
        catalog = exhaustive_orbit_search(args.p, args.n, workers=_threads(args))
        print(
            f"# {catalog.searched} orbit subsets, {len(catalog.entries)} strongly regular,"
            f" {catalog.sampled} cross-checked (seed {catalog.sample_seed})",
            file=sys.stderr,
        )
        subsets = [e.subset for e in catalog.entries]
    records = (_record(tree, s) for s in subsets)
    if not args.include_trivial:
        records = (r for r in records if not r.trivial)
    write_records(records, out)
    return EXIT_OK


def cmd_catalog(args, out, stdin) -> int:
    tree = delta_tree(args.p, args.n)
    catalog = enumerate_catalog(
        args.p, args.n, emit=lambda s, rep: write_records([record_from_report(tree, s, rep)], out), limit=args.limit
    )
    summary = catalog.summary
    print(f"# {summary.total} non-trivial sets" + (" (truncated)" if summary.truncated else ""), file=sys.stderr)
    for tag, count in sorted(summary.families.items()):
        print(f"#   {tag}: {count}", file=sys.stderr)
    return EXIT_OK


def cmd_dual(args, out, stdin) -> int:
    tree = delta_tree(args.p, args.n)
    s = _read_subset(tree, args, stdin)
    d = dual_set(tree, s)
    a, b = srcg_test(tree, s), srcg_test(tree, d)
    write_records([_record(tree, d)], out)
    product = (a.r - a.s) * (b.r - b.s)
    ok = product == tree.ctx.order
    print(f"# (r - s)(r' - s') = {product}, |G| = {tree.ctx.order}: {'ok' if ok else 'FAILED'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_export(args, out, stdin) -> int:
    if args.records is not None:
        try:
            fh = stdin if args.records == "-" else open(args.records)
        except OSError as exc:
            raise UsageError(str(exc)) from None
        with fh:
            items = [(delta_tree(r.p, r.n), r.to_subset()) for r in read_records(fh)]
    else:
        if args.p is None or args.n is None or (args.subset is None and args.vector is None):
            raise UsageError("export needs --records, or -p, -n and a subset")
        tree = delta_tree(args.p, args.n)
        items = [(tree, _read_subset(tree, args, stdin))]
    for tree, s in items:
        if args.format == "records":
            write_records([_record(tree, s)], out)
            continue
        adj = cayley_adjacency(tree, s)
        if args.format == "graph6":
            out.write(to_graph6(adj).decode("ascii"))
        else:
            for line in edge_lines(adj):
                out.write(line + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="srcg", description="Strongly regular Cayley graphs over Z_{p^n}^2.")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--threads", type=int, help=f"worker threads (overrides {THREADS_ENV})")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("tree", help="list the cyclic-subgroup tree")
    _add_group(sp)
    sp.add_argument("--duals", action="store_true", help="append the cocyclic dual of each node")
    sp.set_defaults(func=cmd_tree)

    sp = sub.add_parser("build", help="realize a homogeneity vector")
    _add_group(sp)
    sp.add_argument("--vector", type=_vector, required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--descriptors", action="store_true", help="print the subset file instead of a record")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("classify", help="classify a connection set")
    _add_group(sp)
    _add_subset(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("verify", help="run the three strong-regularity oracles")
    _add_group(sp)
    _add_subset(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("search", help="exhaustive search")
    _add_group(sp)
    sp.add_argument("--symmetric", action="store_true", help="all inverse-closed sets, not just orbit unions")
    sp.add_argument("--include-trivial", action="store_true")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("catalog", help="enumerate the classified families")
    _add_group(sp)
    sp.add_argument("--limit", type=int)
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("dual", help="dual connection set")
    _add_group(sp)
    _add_subset(sp)
    sp.set_defaults(func=cmd_dual)

    sp = sub.add_parser("export", help="export graphs or records")
    sp.add_argument("--format", choices=["graph6", "edges", "records"], required=True)
    sp.add_argument("-p", type=int)
    sp.add_argument("-n", type=int)
    sp.add_argument("--records", metavar="FILE", help="catalog records to export ('-' for stdin)")
    _add_subset(sp, required=False)
    sp.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[List[str]] = None, out: TextIO = None, stdin: TextIO = None) -> int:
    out = out or sys.stdout
    stdin = stdin or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args, out, stdin)
    except (TooLarge, ContextTooLarge, UnsupportedSize) as exc:
        print(f"srcg: size limit: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except AssertionError as exc:
        print(f"srcg: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, NotSrcgInput, ValueError) as exc:
        print(f"srcg: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())

"""Command-line front door: solve, exact, check, gen, trace, bench."""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .errors import (CertificateError, InternalInvariantError, KpcstError,
                     LimitError, ParseError, ValidationError)
from .growth import format_trace, grow, parse_event
from .instance import generate_random, parse_instance, serialize_instance
from .oracle import exact_solve
from .rationals import format_scalar
from .solver import check_result, solution_to_json, solve

_EXIT_CODES = [
    (ParseError, 2),
    (ValidationError, 3),
    ((InternalInvariantError, CertificateError), 4),
    (LimitError, 5),
]


def _load(path) -> "Instance":
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc)) from None
    return parse_instance(text)


def _cmd_solve(args):
    inst = _load(args.file)
    sol = solve(inst)
    sys.stdout.write(solution_to_json(sol, include_certificate=False) + "\n")
    if args.decimal:
        sys.stdout.write("# objective approx %.6f\n" % float(sol.objective))
    if args.certificate:
        Path(args.certificate).write_text(
            solution_to_json(sol, include_certificate=True) + "\n")
    return 0


def _cmd_exact(args):
    inst = _load(args.file)
    res = exact_solve(inst, limit=args.oracle_limit)
    sys.stdout.write("opt %s\n" % format_scalar(res.opt_value))
    sys.stdout.write("edges %s\n" % " ".join(str(i) for i in sorted(res.tree.edges)))
    sys.stdout.write("vertices %s\n"
                     % " ".join(str(v) for v in sorted(res.tree.vertices)))
    if args.decimal:
        sys.stdout.write("# opt approx %.6f\n" % float(res.opt_value))
    return 0


def _cmd_check(args):
    inst = _load(args.file)
    try:
        text = Path(args.result).read_text()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (args.result, exc)) from None
    problems = check_result(inst, text)
    if problems:
        for p in problems:
            sys.stdout.write("FAIL %s\n" % p)
        return 1
    sys.stdout.write("OK\n")
    return 0


def _cmd_gen(args):
    inst = generate_random(args.n, args.m, args.max_cost, args.max_penalty,
                           args.k, args.seed)
    text = serialize_instance(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_trace(args):
    inst = _load(args.file)
    tau = ()
    if args.tau:
        tau = tuple(parse_event(tok) for tok in args.tau.split(",") if tok.strip())
    from .rationals import parse_scalar
    out = grow(inst, parse_scalar(args.lam), tau)
    sys.stdout.write(format_trace(out.trace) + "\n")
    return 0


def _bench_one(path_text, oracle_limit):
    path = Path(path_text)
    inst = parse_instance(path.read_text())
    t0 = time.perf_counter()
    sol = solve(inst)
    elapsed = time.perf_counter() - t0
    ratio = ""
    if inst.n <= oracle_limit:
        opt = exact_solve(inst, limit=oracle_limit).opt_value
        ratio = format_scalar(Fraction(sol.objective, opt)) if opt else "1"
    return (path.name, format_scalar(sol.objective), ratio, elapsed)


def _cmd_bench(args):
    paths = sorted(str(p) for p in Path(args.dir).glob("*.kpcst"))
    if not paths:
        raise ValidationError("no .kpcst files in %s" % args.dir)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, paths,
                                 [args.oracle_limit] * len(paths)))
    else:
        rows = [_bench_one(p, args.oracle_limit) for p in paths]
    rows.sort(key=lambda r: r[0])
    for name, obj, ratio, elapsed in rows:
        line = "%s objective=%s" % (name, obj)
        if ratio:
            line += " ratio=%s" % ratio
        sys.stdout.write(line + "\n")
        sys.stderr.write("%s time=%.3fs\n" % (name, elapsed))
    return 0


def _build_parser():
    ap = argparse.ArgumentParser(prog="kpcst",
                                 description="k-prize-collecting Steiner tree solver")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="approximate an instance")
    p.add_argument("file")
    p.add_argument("--certificate", metavar="PATH",
                   help="also write the result with certificate bundles here")
    p.add_argument("--decimal", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("exact", help="brute-force optimum (small instances)")
    p.add_argument("file")
    p.add_argument("--oracle-limit", type=int, default=18)
    p.add_argument("--decimal", action="store_true")
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("check", help="re-verify a stored result")
    p.add_argument("file")
    p.add_argument("result")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("gen", help="write a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--max-cost", type=int, default=20)
    p.add_argument("--max-penalty", type=int, default=20)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("trace", help="dump the growth event trace")
    p.add_argument("file")
    p.add_argument("--lam", required=True)
    p.add_argument("--tau", default="",
                   help="tie-breaking list, e.g. 'E#0,S{1 2}'")
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("bench", help="solve a directory of instances")
    p.add_argument("dir")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--oracle-limit", type=int, default=12)
    p.set_defaults(func=_cmd_bench)
    return ap


def run_cli(argv) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except KpcstError as exc:
        for classes, code in _EXIT_CODES:
            if isinstance(exc, classes):
                sys.stderr.write("error(%s): %s\n" % (type(exc).__name__, exc))
                return code
        sys.stderr.write("error: %s\n" % exc)
        return 1


def main():
    raise SystemExit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()

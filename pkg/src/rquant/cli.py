"""Command-line interface: ``rquant <command> [options]``.

Exit status is 0 on success, 1 on usage errors and 2 when a verification
finds the certified distortion disagreeing with the closed-form error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from fractions import Fraction

from . import asymptotics as asy
from .algebra import format_quad, format_rat, to_sig_float
from .measure import RNG_ALGORITHM, STANDARD, GeneralIfs
from .optimal import (
    canonical_spec,
    count_optimal_sets,
    ell,
    enumerate_optimal_sets,
    optimal_set,
    quantization_error,
)
from .oracle import distortion_enclosure, kmeans_best_of
from .plotting import RenderSpec, render_svg

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2
MAX_ALL_SETS = 10**4
MAX_TABLE = 10**6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _fl(x) -> float:
    return to_sig_float(x, 15)


def _point_json(p) -> dict:
    return {"exact": [format_quad(p.x1), format_quad(p.x2)], "float": [_fl(p.x1), _fl(p.x2)]}


def _vn_json(v: Fraction) -> dict:
    return {"num": str(v.numerator), "den": str(v.denominator), "float": _fl(v)}


def _write_csv(header, rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


# ---------------------------------------------------------------------------
# commands


def cmd_optimal(args, out) -> int:
    n = args.n
    count = count_optimal_sets(n)
    if args.all:
        if count > MAX_ALL_SETS:
            raise UsageError(f"n={n} has {count} optimal sets; --all is limited to {MAX_ALL_SETS}")
        specs = list(enumerate_optimal_sets(n))
    elif args.index is not None:
        if not 0 <= args.index < count:
            raise UsageError(f"--index must lie in [0, {count - 1}]")
        specs = list(itertools.islice(enumerate_optimal_sets(n), args.index, args.index + 1))
    else:
        specs = [canonical_spec(n)]
    vn = quantization_error(n)
    sets = [(s, optimal_set(s)) for s in specs]
    if args.format == "json":
        doc = {
            "n": n,
            "ell": ell(n),
            "count": str(count),
            "vn": _vn_json(vn),
            "sets": [
                {"spec": s.to_dict(), "points": [_point_json(p) for p in pts]} for s, pts in sets
            ],
        }
        json.dump(doc, out, indent=2, ensure_ascii=False)
        out.write("\n")
    else:
        rows = [
            (i, j, format_quad(p.x1), format_quad(p.x2), _fl(p.x1), _fl(p.x2))
            for i, (_, pts) in enumerate(sets)
            for j, p in enumerate(pts)
        ]
        _write_csv(("set", "point", "x_exact", "y_exact", "x_float", "y_float"), rows, out)
    return EXIT_OK


TABLE_HEADER = ("n", "vn_num", "vn_den", "vn_float", "n2vn_float", "dim_est")


def _table_rows(records):
    for r in records:
        yield (
            r.n,
            r.vn.numerator,
            r.vn.denominator,
            repr(_fl(r.vn)),
            repr(_fl(r.scaled)),
            repr(_fl(r.dim_est)),
        )


def _emit_table(header, rows, fmt, out) -> None:
    rows = list(rows)
    if fmt == "csv":
        _write_csv(header, rows, out)
    else:
        json.dump([dict(zip(header, r)) for r in rows], out, indent=1)
        out.write("\n")


def cmd_error_table(args, out) -> int:
    if args.n_max > MAX_TABLE:
        raise UsageError(f"--n-max is limited to {MAX_TABLE}")
    records = (asy.dimension_record(n) for n in range(1, args.n_max + 1))
    if args.format == "csv":
        _write_csv(TABLE_HEADER, _table_rows(records), out)
    else:
        rows = [
            {
                "n": r.n,
                "vn_num": str(r.vn.numerator),
                "vn_den": str(r.vn.denominator),
                "vn_float": _fl(r.vn),
                "n2vn_float": _fl(r.scaled),
                "dim_est": _fl(r.dim_est),
            }
            for r in records
        ]
        json.dump(rows, out, indent=1)
        out.write("\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    n = args.n
    spec = canonical_spec(n)
    vn = quantization_error(n)
    enc = distortion_enclosure(optimal_set(spec), args.epsilon, args.max_depth)
    ok = enc.contains(vn)
    report = {
        "n": n,
        "spec": spec.to_dict(),
        "vn": _vn_json(vn),
        "enclosure": {
            "lo": format_quad(enc.lo),
            "hi": format_quad(enc.hi),
            "exact": enc.exact,
            "depth_used": enc.depth_used,
            "resolved_cells": enc.resolved_cells,
            "ambiguous_cells": enc.ambiguous_cells,
        },
        "status": ("exact match" if enc.exact else "enclosed") if ok else "MISMATCH",
    }
    json.dump(report, out, indent=2, ensure_ascii=False)
    out.write("\n")
    return EXIT_OK if ok else EXIT_MISMATCH


def _ifs_from_args(args) -> GeneralIfs:
    given = [args.r1, args.r2, args.r3, args.p1, args.p2, args.p3]
    if all(v is None for v in given) and args.family is None:
        return STANDARD
    third = Fraction(1, 3)
    ratios = tuple(third if v is None else v for v in given[:3])
    probs = tuple(third if v is None else v for v in given[3:])
    if any(p <= 0 for p in probs):
        raise UsageError("probabilities must be positive")
    try:
        return GeneralIfs(ratios, probs, args.family or "S")
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_lloyd(args, out) -> int:
    ifs = _ifs_from_args(args)
    state = kmeans_best_of(
        ifs, args.n, args.restarts, args.depth, args.seed, args.max_iters, args.tol, args.init
    )
    report = {
        "n": args.n,
        "mode": "standard" if ifs.is_standard else "general",
        "ifs": {
            "ratios": [format_rat(r) if isinstance(r, Fraction) else r for r in ifs.ratios],
            "probs": [format_rat(p) if isinstance(p, Fraction) else p for p in ifs.probs],
            "family": ifs.family,
        },
        "restarts": args.restarts,
        "depth": args.depth,
        "seed": args.seed,
        "rng": RNG_ALGORITHM,
        "label": "best found",
        "distortion": _fl(state.distortion),
        "surrogate_distortion": _fl(state.surrogate),
        "correction": _fl(state.correction),
        "single_owner": state.single_owner,
        "converged": state.converged,
        "iterations": state.iterations,
        "points": [[_fl(x), _fl(y)] for x, y in state.points],
    }
    if ifs.is_standard:
        vn = quantization_error(args.n)
        report["vn"] = _vn_json(vn)
        report["gap"] = _fl(state.distortion - float(vn))
    json.dump(report, out, indent=2)
    out.write("\n")
    return EXIT_OK


def cmd_asymptotics(args, out) -> int:
    if args.kind == "dimension":
        _emit_table(TABLE_HEADER, _table_rows(asy.dimension_scan(args.n_max)), args.format, out)
        return EXIT_OK
    x = args.x
    if not 1 <= x <= 2:
        raise UsageError(f"--x must lie in [1, 2], got {x}")
    fx = asy.f(x)
    header = ("level", "n", "scaled_num", "scaled_den", "scaled_float", "f_x", "gap")
    rows = [
        (l, n, s.numerator, s.denominator, repr(_fl(s)), format_rat(fx), repr(_fl(s - fx)))
        for l, n, s in asy.accumulation_scan(x, args.levels)
    ]
    _emit_table(header, rows, args.format, out)
    return EXIT_OK


def cmd_render(args, out) -> int:
    try:
        spec = RenderSpec(args.depth, args.width, args.radius, args.labels)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    pts = optimal_set(canonical_spec(args.n))
    path = render_svg(pts, spec, args.out, title=args.title)
    out.write(f"{path}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rquant", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    o = sub.add_parser("optimal", help="closed-form optimal sets of n-means")
    o.add_argument("--n", type=_positive, required=True)
    mode = o.add_mutually_exclusive_group()
    mode.add_argument("--canonical", action="store_true", help="lexicographically first set (default)")
    mode.add_argument("--all", action="store_true", help=f"every optimal set (count <= {MAX_ALL_SETS})")
    mode.add_argument("--index", type=int, help="k-th set in enumeration order, 0-based")
    o.add_argument("--format", choices=("json", "csv"), default="json")
    o.set_defaults(func=cmd_optimal)

    t = sub.add_parser("error-table", help="V_n, n^2 V_n and dimension estimates")
    t.add_argument("--n-max", type=_positive, required=True)
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.set_defaults(func=cmd_error_table)

    v = sub.add_parser("verify", help="certify V_n by cell subdivision")
    v.add_argument("--n", type=_positive, required=True)
    v.add_argument("--epsilon", type=_rational, default=Fraction(0))
    v.add_argument("--max-depth", type=int, default=12, choices=range(0, 31), metavar="[0-30]")
    v.set_defaults(func=cmd_verify)

    ll = sub.add_parser("lloyd", help="multi-start Lloyd search on the atomic surrogate")
    ll.add_argument("--n", type=_positive, required=True)
    ll.add_argument("--restarts", type=_positive, default=64)
    ll.add_argument("--depth", type=int, default=7, choices=range(0, 13), metavar="[0-12]")
    ll.add_argument("--seed", type=int, default=0)
    ll.add_argument("--max-iters", type=_positive, default=1000)
    ll.add_argument("--tol", type=float, default=1e-15)
    ll.add_argument("--init", choices=("uniform", "kmeans++"), default="uniform")
    for name in ("r1", "r2", "r3", "p1", "p2", "p3"):
        ll.add_argument(f"--{name}", type=_rational)
    ll.add_argument("--family", choices=("S", "T"))
    ll.set_defaults(func=cmd_lloyd)

    a = sub.add_parser("asymptotics", help="dimension and coefficient scans")
    asub = a.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    d = asub.add_parser("dimension")
    d.add_argument("--n-max", type=int, required=True)
    d.add_argument("--format", choices=("csv", "json"), default="csv")
    c = asub.add_parser("coefficient")
    c.add_argument("--x", type=_rational, required=True)
    c.add_argument("--levels", type=_positive, required=True)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    a.set_defaults(func=cmd_asymptotics)

    r = sub.add_parser("render", help="SVG of the canonical optimal set over the cells")
    r.add_argument("--n", type=_positive, required=True)
    r.add_argument("--depth", type=int, default=3)
    r.add_argument("--width", type=int, default=400, help="width in pixels")
    r.add_argument("--radius", type=int, default=3, help="point radius in pixels")
    r.add_argument("--labels", action="store_true")
    r.add_argument("--title")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except (UsageError, ValueError) as exc:
        print(f"rquant: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rquant: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``delzant <subcommand> ...``.

Exit codes: 0 success, 1 usage or malformed input, 2 the polytope is not
Delzant, 3 a verification check failed.
"""
from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import charts, transitions, verify
from .formats import (FormatError, dumps, fmt_float, point_doc, polytope_to_text, read_point,
                      read_polytope_text)
from .polytope import DelzantPolytope, InvalidPolytopeError, as_rational, format_rational, hirzebruch, simplex

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3

MAPS = ("mu", "r", "theta", "theta-inv", "phi", "toric", "mu-toric", "section", "stratum")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage, which is reserved here for invalid polytopes
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _rationals(text: str) -> list[Fraction]:
    try:
        return [as_rational(x) for x in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(Fraction(x.strip())) for x in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise FormatError(path, e.strerror or str(e)) from None


def _load(path: str) -> DelzantPolytope:
    return read_polytope_text(_read_text(path), "<stdin>" if path == "-" else path)


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt_point(xi) -> str:
    return "(" + ", ".join(format_rational(x) for x in xi) + ")"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    P = _load(args.polytope)
    if args.emit:
        _write(args.emit, polytope_to_text(P))
    if args.emit not in ("-",):
        print(f"valid Delzant polytope: dim {P.dim}, {len(P.facets)} facets, {len(P.vertices)} vertices")
        for v in P.vertices:
            print(f"{v.id}\t{_fmt_point(v.position)}\t{{{', '.join(v.facets)}}}\tdet {v.determinant}")
    return EXIT_OK


def cmd_example(args) -> int:
    lam = args.lam
    if args.family == "simplex":
        if args.n is None:
            raise UsageError("example simplex: --n is required")
        if lam is None:
            lam = [Fraction(1)] + [Fraction(0)] * args.n
        P = simplex(args.n, lam)
    else:
        if args.m is None:
            raise UsageError("example hirzebruch: -m is required")
        P = hirzebruch(args.m, lam if lam is not None else [1, 1, max(1, args.m), 1])
    _write(args.out, polytope_to_text(P))
    return EXIT_OK


def cmd_atlas(args) -> int:
    P = _load(args.polytope)
    for v in P.vertices:
        print(f"{v.id}\t{_fmt_point(v.position)}\tF = {{{', '.join(v.facets)}}}")
    for v in P.vertex_ids:
        for w in P.vertex_ids:
            if v == w:
                continue
            bc = P.base_change(v, w).matrix
            print(f"\n{v} -> {w}")
            print("  base change X_f = sum_g c[f,g] X_g")
            width = max(len(k) for k in bc.row_keys + bc.col_keys) + 2
            print("  " + " " * width + "".join(g.rjust(width) for g in bc.col_keys))
            for f, row in zip(bc.row_keys, bc.rows):
                print("  " + f.rjust(width) + "".join(str(x).rjust(width) for x in row))
            print("  toric transition")
            for j, g in enumerate(bc.col_keys):
                mono = " * ".join(f"zeta_{f}^{row[j]}" if row[j] != 1 else f"zeta_{f}"
                                  for f, row in zip(bc.row_keys, bc.rows) if row[j])
                print(f"    zeta'_{g} = {mono or '1'}")
    return EXIT_OK


def cmd_eval(args) -> int:
    P = _load(args.polytope)
    if args.map == "r":
        if args.facet is None:
            raise UsageError("eval r: --facet is required")
        if args.facet not in P.facet_ids:
            raise UsageError(f"eval r: unknown facet {args.facet!r}")
        if args.xi is not None:
            if len(args.xi) != P.dim:
                raise UsageError(f"eval r: --xi needs {P.dim} components")
            xi = np.array(args.xi)
        elif args.point is not None:
            xi = charts.mu_v(P, read_point(args.point, P, args.vertex))
        else:
            raise UsageError("eval r: give --xi or --point")
        print(dumps({"facet": args.facet, "r": charts.r_f(P, args.facet, xi)}))
        return EXIT_OK

    if args.point is None:
        raise UsageError(f"eval {args.map}: --point is required")
    z = read_point(args.point, P, args.vertex)
    if args.map in ("phi", "toric"):
        if args.to is None:
            raise UsageError(f"eval {args.map}: --to is required")
        if args.to not in P.vertex_ids:
            raise UsageError(f"eval {args.map}: unknown vertex {args.to!r}")

    if args.map == "mu":
        out = {"xi": charts.mu_v(P, z)}
    elif args.map == "theta":
        out = point_doc(transitions.theta(P, z))
    elif args.map == "theta-inv":
        out = point_doc(transitions.theta_inverse(P, z))
    elif args.map == "phi":
        out = point_doc(transitions.phi(P, z, args.to))
    elif args.map == "toric":
        out = point_doc(transitions.toric_transition(P, z, args.to))
    elif args.map == "mu-toric":
        out = {"xi": transitions.mu_toric(P, z)}
    elif args.map == "section":
        out = point_doc(charts.section_s_v(P, z))
    else:
        out = {"facets": sorted(charts.stratum_of(P, z))}
    print(dumps(out))
    return EXIT_OK


def cmd_verify(args) -> int:
    P = _load(args.polytope)
    cfg = verify.SampleConfig(args.samples, args.seed, args.margin)
    result = verify.run_suite(P, cfg, tolerance=args.tol)
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in result.reports:
            fh.write(r.to_json() + "\n")
    failed = [r for r in result.reports if not r.passed]
    for name in sorted({r.check for r in result.reports}):
        group = result.by_check(name)
        ok = all(r.passed for r in group)
        print(f"{name:20s} {'pass' if ok else 'FAIL'}  max error {fmt_float(result.worst(name))}"
              f"  ({len(group)} reports)")
    if result.missing:
        print(f"missing checks: {sorted(result.missing)}", file=sys.stderr)
    if failed or result.missing:
        print(f"{len(failed)} of {len(result.reports)} reports failed; see {args.out}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"all {len(result.reports)} reports passed; written to {args.out}")
    return EXIT_OK


def cmd_sample(args) -> int:
    P = _load(args.polytope)
    cfg = verify.SampleConfig(args.samples, args.seed, args.margin)
    verts = [args.vertex] if args.vertex else list(P.vertex_ids)
    for v in verts:
        if v not in P.vertex_ids:
            raise UsageError(f"sample: unknown vertex {v!r}")
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([f"xi{i + 1}" for i in range(P.dim)])
        for v in verts:
            rng = verify.generator(cfg.seed, "sample", (v,))
            for z in verify.sample_chart_points(P, v, cfg.count, cfg.margin_for(P), rng):
                writer.writerow([fmt_float(x) for x in charts.mu_v(P, z)])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="delzant", description="Charts and transition maps of Delzant spaces.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("validate", help="check the Delzant conditions and print the vertex table")
    s.add_argument("polytope", help="polytope file, or - for standard input")
    s.add_argument("--emit", metavar="PATH", help="also write the canonical form (- for standard output)")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("example", help="write a simplex or Hirzebruch polytope file")
    s.add_argument("family", choices=("simplex", "hirzebruch"))
    s.add_argument("--n", type=int, help="dimension of the simplex")
    s.add_argument("-m", type=int, help="Hirzebruch twist m >= 0")
    s.add_argument("--lambda", dest="lam", type=_rationals, help="comma-separated offsets, e.g. 1,0,0 or 1/2,1/2")
    s.add_argument("--out", help="output path (default: standard output)")
    s.set_defaults(func=cmd_example)

    s = sub.add_parser("atlas", help="print base-change matrices and toric transitions for all vertex pairs")
    s.add_argument("polytope")
    s.set_defaults(func=cmd_atlas)

    s = sub.add_parser("eval", help="apply one map to a point")
    s.add_argument("map", choices=MAPS)
    s.add_argument("--polytope", required=True)
    s.add_argument("--vertex", help="chart vertex (optional if the point file names it)")
    s.add_argument("--point", help="chart point file")
    s.add_argument("--to", help="target vertex for phi and toric")
    s.add_argument("--facet", help="facet for r")
    s.add_argument("--xi", type=_floats, help="momentum for r, comma-separated")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("verify", help="run the randomized check suite")
    s.add_argument("polytope")
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, help="override every check tolerance")
    s.add_argument("--margin", type=float, help="sampling margin (default 0.05 * inradius)")
    s.add_argument("--out", default="verify-report.ndjson", help="NDJSON report path")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sample", help="CSV of momenta of sampled chart points")
    s.add_argument("polytope")
    s.add_argument("--vertex", help="chart to sample (default: all)")
    s.add_argument("--samples", type=int, default=200, help="points per chart")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--margin", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except FormatError as e:
        print(f"malformed input: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidPolytopeError as e:
        print("not a Delzant polytope:", file=sys.stderr)
        for v in e.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, ArithmeticError, transitions.ConvergenceFailure) as e:
        # domain errors, bad sample settings, solver failures
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit codes: 0 success, 1 domain error (bad spec, limits, non-prime field...),
2 usage error.
"""

from __future__ import annotations

import argparse
import secrets
import sys
import time
from fractions import Fraction

import mpmath

from . import exactprob, montecarlo
from .finitefield import PrimeField
from .polynomials import LimitExceeded, enumerate_irreducibles, format_poly
from .tables import TABLE1_BLOCKS, TABLE1_DIGITS, load_spec, table1_specs


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockpmp",
        description="Probability that random block projections preserve a matrix minimal polynomial over GF(q).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pmp", help="exact probability for a matrix of given elementary divisors")
    p.add_argument("--spec", required=True, help="spec JSON file, or a bundled name a1..a5")
    p.add_argument("--b", type=_positive, required=True, help="block size")
    p.add_argument("--digits", type=int, default=3)
    p.add_argument("--fraction", action="store_true", help="also print the exact rational")

    p = sub.add_parser("worst", help="worst-case probability over all n x n matrices")
    p.add_argument("--q", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--b", type=_positive, required=True)
    p.add_argument("--mode", choices=["auto", "exact", "log", "approx"], default="auto")
    p.add_argument("--digits", type=int, default=3)
    p.add_argument("--both-readings", action="store_true",
                   help="also evaluate the single-exponent form of the closed formula")

    p = sub.add_parser("table1", help="exact probabilities for the five 5x5 examples over GF(7), b = 1..4")
    p.add_argument("--digits", type=int, default=None, help="decimals for every cell (default: 3 to 7 as in the reference table)")
    p.add_argument("--out", help="write CSV here instead of printing a table")

    p = sub.add_parser("figure1", help="worst-case failure probability vs block size")
    p.add_argument("--n", type=_positive, default=10**8)
    p.add_argument("--qs", type=_int_list, default=[2, 3, 5, 7, 11, 13])
    p.add_argument("--bmax", type=_positive, default=24)
    p.add_argument("--out", help="CSV output path (stdout if omitted)")

    p = sub.add_parser("simulate", help="Monte-Carlo estimate of the success probability")
    p.add_argument("--spec", required=True)
    p.add_argument("--b", type=_positive, required=True)
    p.add_argument("--trials", type=_positive, default=10**4)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--method", choices=["divisor", "bm"], default="divisor")
    p.add_argument("--out", help="append the report as a CSV row here")

    p = sub.add_parser("enumerate", help="exact success fraction over all (U, V) pairs")
    p.add_argument("--spec", required=True)
    p.add_argument("--b", type=_positive, required=True)
    p.add_argument("--limit", type=_positive, default=montecarlo.DEFAULT_EXHAUSTIVE_LIMIT)

    p = sub.add_parser("irreducibles", help="count (and optionally list) monic irreducibles")
    p.add_argument("--q", type=_positive, required=True)
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--list", action="store_true")

    p = sub.add_parser("compare-bounds", help="single-vector bounds: Wiedemann, Kaltofen-Pan, exact worst case")
    p.add_argument("--q", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)
    return parser


def _print_table(header: list[str], rows: list[list[str]]) -> None:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(str(c).rjust(w) for c, w in zip(r, widths)))


def cmd_pmp(args) -> None:
    spec = load_spec(args.spec)
    value = exactprob.pmp_exact(spec, args.b)
    print(exactprob.to_decimal(value, args.digits))
    if args.fraction:
        print(Fraction(value))


def cmd_worst(args) -> None:
    mode = args.mode
    if mode == "auto":
        mode = "exact" if args.n <= exactprob.DEFAULT_EXACT_LIMIT else "log"
    readings = ["per-degree", "single-exponent"] if args.both_readings else ["per-degree"]
    for reading in readings:
        label = f"[{reading}] " if args.both_readings else ""
        if mode == "exact":
            value = exactprob.pmpmin_exact(args.q, args.n, args.b, reading=reading)
            print(label + exactprob.to_decimal(value, args.digits))
        elif mode == "log":
            res = exactprob.pmpmin_log(args.q, args.n, args.b, reading=reading)
            print(f"{label}pmpmin  {mpmath.nstr(res.pmpmin, max(args.digits, 12))}")
            print(f"{label}failure {mpmath.nstr(res.failure, 12)}")
        else:
            if reading == "single-exponent":
                continue
            print(f"{exactprob.pmpmin_approx(args.q, args.n, args.b):.{args.digits}f}")
    prof = exactprob.worst_profile(args.q, args.n)
    print(f"# cutoff degree m={prof.m}, counts per degree {list(prof.counts)}, residual {prof.residual}",
          file=sys.stderr)


def cmd_table1(args) -> None:
    specs = table1_specs()
    if args.out:
        rows = montecarlo.sweep(specs, TABLE1_BLOCKS, trials=0, digits=args.digits or 12)
        with open(args.out, "w", newline="") as fh:
            montecarlo.write_csv(rows, fh)
        return
    print(table1_text(args.digits))


def table1_text(digits: int | None = None) -> str:
    lines = []
    header = [""] + [f"b={b}" for b in TABLE1_BLOCKS]
    body = []
    for (name, spec), row_digits in zip(table1_specs(), TABLE1_DIGITS):
        cells = [exactprob.to_decimal(exactprob.pmp_exact(spec, b), digits or k)
                 for b, k in zip(TABLE1_BLOCKS, row_digits)]
        body.append([name] + cells)
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    for r in [header] + body:
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)


def cmd_figure1(args) -> None:
    rows = montecarlo.figure1_rows(args.qs, args.n, range(1, args.bmax + 1))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            montecarlo.write_csv(rows, fh, montecarlo.FIGURE1_COLUMNS)
    else:
        montecarlo.write_csv(rows, sys.stdout, montecarlo.FIGURE1_COLUMNS)


def cmd_simulate(args) -> None:
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(63)
        print(f"# seed {seed} (auto-generated)", file=sys.stderr)
    spec = load_spec(args.spec)
    rep = montecarlo.estimate_pmp(spec, args.b, args.trials, seed, threads=args.threads, method=args.method)
    print(rep.summary())
    if args.out:
        import os

        new = not os.path.exists(args.out) or os.path.getsize(args.out) == 0
        row = {"case": args.spec, "q": spec.q, "n": spec.n, "b": args.b,
               "exact": exactprob.to_decimal(rep.exact, 12), "estimate": f"{rep.estimate:.6f}",
               "trials": rep.trials, "successes": rep.successes, "z": f"{rep.z_score:.4f}",
               "ci_lo": f"{rep.ci95[0]:.6f}", "ci_hi": f"{rep.ci95[1]:.6f}", "seed": seed}
        with open(args.out, "a", newline="") as fh:
            if new:
                montecarlo.write_csv([row], fh)
            else:
                import csv

                csv.DictWriter(fh, fieldnames=montecarlo.CSV_COLUMNS, lineterminator="\n").writerow(row)


def cmd_enumerate(args) -> None:
    spec = load_spec(args.spec)
    start = time.perf_counter()
    value = montecarlo.exhaustive_pmp(spec, args.b, limit=args.limit)
    exact = exactprob.pmp_exact(spec, args.b)
    print(f"exhaustive {Fraction(value)}  ({float(value):.12f})")
    print(f"formula    {Fraction(exact)}  ({float(exact):.12f})")
    print(f"match      {value == exact}")
    print(f"elapsed    {time.perf_counter() - start:.2f}s")


def cmd_irreducibles(args) -> None:
    print(exactprob.count_irreducibles(args.q, args.m))
    if args.list:
        for f in enumerate_irreducibles(PrimeField(args.q), args.m):
            print(format_poly(f))


def cmd_compare_bounds(args) -> None:
    res = exactprob.comparison_bounds(args.q, args.n)
    _print_table(["bound", "value"], [[k, f"{v:.6f}"] for k, v in
                                       (("kaltofen_pan", res["kaltofen_pan"]), ("wiedemann", res["wiedemann"]),
                                        ("ours", res["ours"]))])


COMMANDS = {
    "pmp": cmd_pmp,
    "worst": cmd_worst,
    "table1": cmd_table1,
    "figure1": cmd_figure1,
    "simulate": cmd_simulate,
    "enumerate": cmd_enumerate,
    "irreducibles": cmd_irreducibles,
    "compare-bounds": cmd_compare_bounds,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except (ValueError, ZeroDivisionError, LimitExceeded, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())

"""Command-line entry point: ``ffl solve|verify|gen|bench``.

Exit codes: 0 success, 1 verification failure, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import solver as _solver
from .bench import DISTRIBUTIONS, generate_instance, run_bench
from .geometry import FFLError
from .io import dumps_instance, load_instance, solution_report
from .oracle import OracleConfig, oracle_solve

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_solve(args) -> int:
    inst = load_instance(args.input)
    sol = _solver.solve(inst, args.mode)
    report = solution_report(sol, inst)
    _write(json.dumps(report, indent=2) + "\n", args.output)
    if args.svg:
        from .svg import render_svg

        Path(args.svg).write_text(render_svg(sol, inst))
    if args.figure:
        from .plotting import plot_solution

        plot_solution(sol, inst, args.figure)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(args.input)
    config = OracleConfig(
        angle_samples=args.angle_samples,
        offset_samples=args.offset_samples,
        entry_samples=args.entry_samples,
        max_points=None if args.force else 10,
    )
    if not args.force and inst.n > 10:
        print(f"error: verify is limited to 10 points (got {inst.n}); pass --force to override", file=sys.stderr)
        return EXIT_USAGE
    sol = _solver.solve(inst, "full")
    res = oracle_solve(inst, config)
    problems = _solver.check_solution(sol, inst)
    tol = 1e-9 * max(1.0, abs(res.candidate_best))
    if sol.objective < res.lower_certificate:
        problems.append("solver objective is below the dense-scan lower certificate")
    if sol.objective > res.candidate_best + tol:
        problems.append("candidate enumeration beats the solver")
    if sol.objective > res.best_sampled + tol:
        problems.append("a scanned solution beats the solver")
    out = {
        "solver_objective": sol.objective,
        "dense_best": res.best_sampled,
        "lower_certificate": res.lower_certificate,
        "candidate_best": res.candidate_best,
        "delta": res.delta,
        "ok": not problems,
        "problems": problems,
    }
    _write(json.dumps(out, indent=2) + "\n", args.output)
    return EXIT_OK if not problems else EXIT_VERIFY


def _weight_range(text: str):
    try:
        lo, hi = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}") from None
    return lo, hi


def cmd_gen(args) -> int:
    inst = generate_instance(
        args.n,
        seed=args.seed,
        v=args.v,
        distribution=args.distribution,
        weight_range=args.weight_range,
        extent=args.extent,
        clusters=args.clusters,
        integer=args.integer,
    )
    _write(dumps_instance(inst), args.output)
    return EXIT_OK


def _sizes(text: str):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_bench(args) -> int:
    rows, slope = run_bench(args.sizes, repeats=args.repeats, v=args.v, seed=args.seed)
    delim = "\t" if args.format == "tsv" else ","
    out = sys.stdout if args.output in (None, "-") else open(args.output, "w", newline="")
    try:
        w = csv.writer(out, delimiter=delim, lineterminator="\n")
        w.writerow(["n", "median_seconds", "objective"])
        for r in rows:
            w.writerow([r["n"], f"{r['median_s']:.6f}", repr(r["objective"])])
        if slope is not None:
            w.writerow(["slope", f"{slope:.4f}", ""])
    finally:
        if out is not sys.stdout:
            out.close()
    if args.plot:
        from .plotting import plot_scaling

        plot_scaling([r["n"] for r in rows], [r["median_s"] for r in rows], slope, args.plot)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ffl", description="Optimal facility and highway placement under the L1 metric.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("--input", required=True)
    s.add_argument("--output", help="report path (default: stdout)")
    s.add_argument("--svg", help="also write an SVG drawing")
    s.add_argument("--figure", help="also write a matplotlib figure (png, pdf, ...)")
    s.add_argument("--mode", choices=["auto", "case-a", "full"], default="auto")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check the solver against the brute-force oracle")
    v.add_argument("--input", required=True)
    v.add_argument("--output")
    v.add_argument("--angle-samples", type=int, default=OracleConfig.angle_samples)
    v.add_argument("--offset-samples", type=int, default=OracleConfig.offset_samples)
    v.add_argument("--entry-samples", type=int, default=OracleConfig.entry_samples)
    v.add_argument("--force", action="store_true", help="allow more than 10 points")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--v", type=float, default=2.0)
    g.add_argument("--distribution", choices=DISTRIBUTIONS, default="uniform")
    g.add_argument("--weight-range", type=_weight_range, default=(1.0, 5.0), metavar="LO,HI")
    g.add_argument("--extent", type=float, default=100.0)
    g.add_argument("--clusters", type=int, default=3)
    g.add_argument("--integer", action="store_true", help="integer coordinates and weights")
    g.add_argument("--output")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="time the solver over instance sizes")
    b.add_argument("--sizes", type=_sizes, default=[25, 50, 100, 200])
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--v", type=float, default=2.0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--format", choices=["csv", "tsv"], default="csv")
    b.add_argument("--output")
    b.add_argument("--plot", help="also write a log-log plot")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FFLError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

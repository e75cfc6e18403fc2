"""Command-line front end emitting reproducible result tables.

All subcommands print rows in one fixed CSV schema (or the same rows as a
JSON array with ``--json``); numeric fields use 9 significant digits and
seeded subcommands are bit-deterministic.  Exit codes: 0 success, 1
numeric failure, 2 flag errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import circle, frontier, simlab, stagger
from .quadrature import QuadratureError
from .sources import parse_source

CSV_HEADER = "scheme,params,rate_bits,distortion,perception_ks,provenance,seed,n_samples"
_COLUMNS = CSV_HEADER.split(",")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_COLUMNS)
    for row in rows:
        writer.writerow([
            str(row[c]) if c in ("scheme", "params", "provenance")
            else _fmt(row[c]) for c in _COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: list[dict]) -> str:
    cooked = []
    for row in rows:
        item = {}
        for c in _COLUMNS:
            v = row[c]
            if isinstance(v, (np.integer,)):
                v = int(v)
            elif isinstance(v, (np.floating,)):
                v = float(v)
            item[c] = v
        cooked.append(item)
    return json.dumps(cooked, indent=2) + "\n"


def _point_row(scheme: str, point: circle.FrontierPoint) -> dict:
    return {
        "scheme": scheme,
        "params": point.params,
        "rate_bits": point.rate_bits,
        "distortion": point.distortion,
        "perception_ks": None,
        "provenance": point.provenance,
        "seed": None,
        "n_samples": None,
    }


def _add_output_flags(sp):
    sp.add_argument("--out", default=None, help="write rows to this file")
    sp.add_argument("--json", action="store_true",
                    help="emit a JSON array instead of CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdplab",
        description="Staggered/dithered quantizer experiments and reference "
                    "rate-distortion frontiers at perfect perceptual quality.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("circle-closed-form",
                        help="closed-form (rate, distortion) of N staggered "
                             "L-level circle quantizers")
    sp.add_argument("--L", type=int, required=True, help="quantizer levels")
    sp.add_argument("--N", type=int, default=1, help="staggered offsets")
    _add_output_flags(sp)

    sp = sub.add_parser("circle-simulate",
                        help="Monte Carlo run of a circle coder")
    sp.add_argument("--L", type=int, required=True, help="quantizer levels")
    sp.add_argument("--N", type=int, default=1, help="staggered offsets")
    sp.add_argument("--dithered", action="store_true",
                    help="simulate the dithered coder instead of staggered")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    _add_output_flags(sp)

    sp = sub.add_parser("one-shot-frontier",
                        help="extreme points of the one-shot frontier up to Lmax")
    sp.add_argument("--Lmax", type=int, required=True)
    _add_output_flags(sp)

    sp = sub.add_parser("rdp-frontier",
                        help="perfect-perception frontier on a log-spaced "
                             "concentration grid")
    sp.add_argument("--lambda-min", type=float, default=0.01)
    sp.add_argument("--lambda-max", type=float, default=100.0)
    sp.add_argument("--points", type=int, default=25)
    _add_output_flags(sp)

    sp = sub.add_parser("scalar-simulate",
                        help="end-to-end staggered pipeline on a scalar source")
    sp.add_argument("--source", required=True,
                    help="uniform:lo,hi | gauss:mu,sigma | circle")
    sp.add_argument("--delta", type=float, required=True, help="stepsize")
    sp.add_argument("--offsets", type=int, default=1)
    sp.add_argument("--origin", type=float, default=0.0,
                    help="grid anchor (cell edges of offset 0 at origin + "
                         "(k+1/2)*delta)")
    sp.add_argument("--literal-paper-indexing", action="store_true",
                    help="use the unshifted boundary indexing (comparison mode)")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    _add_output_flags(sp)

    sp = sub.add_parser("scalar-exact",
                        help="exact code masses, rates and distortion of the "
                             "staggered scheme plus the dithered baseline")
    sp.add_argument("--source", required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--offsets", type=int, default=1)
    sp.add_argument("--origin", type=float, default=0.0)
    sp.add_argument("--literal-paper-indexing", action="store_true")
    _add_output_flags(sp)

    sp = sub.add_parser("two-cell",
                        help="grid search for the optimal two-cell split")
    sp.add_argument("--r", type=float, required=True,
                    help="combined size of the two cells as a circle fraction")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--grid", type=int, default=100_000)
    _add_output_flags(sp)

    sp = sub.add_parser("sweep", help="run the sweep described by a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--axis", default=None,
                    help="parameter to sweep (levels, offsets, delta, lambda, "
                         "samples, seed); omit for a single run")
    sp.add_argument("--values", default=None,
                    help="comma-separated sweep values")
    _add_output_flags(sp)
    return parser


def _run(args) -> list[dict]:
    cmd = args.command
    if cmd == "circle-closed-form":
        return [_point_row("circle-staggered",
                           circle.staggered_circle_rd(args.L, args.N))]
    if cmd == "circle-simulate":
        scheme = "circle-dithered" if args.dithered else "circle-staggered"
        cfg = simlab.ExperimentConfig(scheme=scheme, levels=args.L,
                                      offsets=args.N, n_samples=args.samples,
                                      seed=args.seed)
        return simlab.run_experiment(cfg)
    if cmd == "one-shot-frontier":
        return [_point_row("one-shot", p)
                for p in circle.one_shot_frontier(args.Lmax)]
    if cmd == "rdp-frontier":
        if args.points < 1:
            raise ValueError("need at least one grid point")
        if args.lambda_min <= 0 or args.lambda_max < args.lambda_min:
            raise ValueError("need 0 < lambda-min <= lambda-max")
        if args.points == 1:
            grid = [args.lambda_min]
        else:
            grid = np.geomspace(args.lambda_min, args.lambda_max,
                                args.points).tolist()
        return [_point_row("rdp-frontier", p) for p in frontier.rdp_curve(grid)]
    if cmd == "scalar-simulate":
        cfg = simlab.ExperimentConfig(
            scheme="scalar-staggered", source=args.source, delta=args.delta,
            offsets=args.offsets, origin=args.origin,
            literal_paper_indexing=args.literal_paper_indexing,
            n_samples=args.samples, seed=args.seed)
        return simlab.run_experiment(cfg)
    if cmd == "scalar-exact":
        return _scalar_exact_rows(args)
    if cmd == "two-cell":
        rep = circle.verify_two_cell_optimality(args.r, args.lam, args.grid)
        params = (f"r={_fmt(args.r)};lambda={_fmt(args.lam)};grid={args.grid};"
                  f"alpha_opt={_fmt(rep.alpha_opt)};"
                  f"is_midpoint={int(rep.is_midpoint)};"
                  f"boundary_optimum={int(rep.boundary_optimum)}")
        return [{"scheme": "two-cell", "params": params, "rate_bits": None,
                 "distortion": None, "perception_ks": None,
                 "provenance": "grid-search", "seed": None, "n_samples": None}]
    # sweep
    base = simlab.parse_config_file(args.config)
    if args.axis is None:
        return simlab.run_experiment(base)
    if args.values is None:
        raise ValueError("--axis requires --values")
    values = [v for v in args.values.split(",") if v]
    return simlab.sweep(base, args.axis, values)


def _scalar_exact_rows(args) -> list[dict]:
    spec = stagger.StaggeredSpec(
        source=parse_source(args.source), delta=args.delta,
        n_offsets=args.offsets, origin=args.origin,
        literal_paper_indexing=args.literal_paper_indexing)
    dist = stagger.exact_code_distribution(spec)
    base = (f"source={args.source};delta={_fmt(args.delta)};"
            f"N={args.offsets};origin={_fmt(args.origin)}")
    rows = [{
        "scheme": "scalar-staggered",
        "params": base + f";pooled_H={_fmt(dist.pooled_entropy_bits)}",
        "rate_bits": dist.avg_conditional_entropy_bits,
        "distortion": dist.mse_exact,
        "perception_ks": 0.0,
        "provenance": "exact",
        "seed": None,
        "n_samples": None,
    }, {
        "scheme": "scalar-dithered",
        "params": (f"source={args.source};delta={_fmt(args.delta)};"
                   f"cells={dist.dithered.n_cells};"
                   f"H={_fmt(dist.dithered.entropy_bits)}"),
        "rate_bits": dist.dithered.fixed_rate_bits,
        "distortion": dist.dithered.mse,
        "perception_ks": None,
        "provenance": "exact",
        "seed": None,
        "n_samples": None,
    }]
    return rows


def cli_dispatch(argv) -> int:
    """Parse argv, run the subcommand, write rows.  Returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:      # argparse exits 2 on flag errors, 0 on --help
        return int(exc.code or 0)
    try:
        rows = _run(args)
        text = rows_to_json(rows) if args.json else rows_to_csv(rows)
    except (ValueError, QuadratureError, RuntimeError, OSError) as exc:
        print(f"rdplab: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

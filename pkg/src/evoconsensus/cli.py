"""Command-line entry point: ``evoconsensus {simulate,ensemble,spectrum,check}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .dynamics import run_trial
from .game import ConfigError
from .harness import emit_csv, emit_trajectory_csv, load_config, report_json, run_ensemble
from .spectral import spectrum
from .topology import dump_graph, is_connected, load_graph

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("simulation config (overrides --config)")
    g.add_argument("--config", type=Path, help="flat JSON file with SimConfig keys")
    g.add_argument("--n", type=int)
    g.add_argument("--p1", type=float)
    g.add_argument("--p2", type=float)
    g.add_argument("--b", type=float)
    g.add_argument("--c", type=float)
    g.add_argument("--delta", type=float, help="step size (default 1/n)")
    g.add_argument("--steps", type=int)
    g.add_argument("--trials", type=int)
    g.add_argument("--seed", type=int, dest="master_seed")
    g.add_argument("--record-every", type=int)
    g.add_argument("--fixed-graph", action="store_const", const=True,
                   help="use one feasible graph for every trial")
    g.add_argument("--allow-large-delta", action="store_const", const=True)
    g.add_argument("--record-states", action=argparse.BooleanOptionalAction, default=None)


def _config(args):
    keys = ("n", "p1", "p2", "b", "c", "delta", "steps", "trials", "master_seed",
            "record_every", "fixed_graph", "allow_large_delta", "record_states")
    return load_config(args.config, **{k: getattr(args, k) for k in keys})


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_simulate(args) -> int:
    cfg = _config(args)
    tr = run_trial(cfg, args.trial)
    if args.dump_graph:
        dump_graph(tr.graph, args.dump_graph)
    if args.out:
        emit_trajectory_csv(tr, args.out)
    _print_json({
        "trial": args.trial,
        "seed": tr.seed,
        "edges": tr.graph.m,
        "average": tr.average,
        "final_V": float(tr.V[-1]),
        "final_relerr": float(tr.relerr[-1]),
        "final_inf_error": float(np.max(np.abs(tr.x_final - tr.average))),
        "max_sum_drift": tr.max_sum_drift,
        "box_violations": tr.box_violations,
        "lyapunov_increases": tr.lyapunov_increases,
        "out": str(args.out) if args.out else None,
    })
    return EXIT_OK


def cmd_ensemble(args) -> int:
    cfg = _config(args)
    report = run_ensemble(cfg, parallelism=args.jobs)
    emit_csv(report, args.out)
    report_path = args.report or Path(str(args.out) + ".json")
    Path(report_path).write_text(report_json(report) + "\n")
    _print_json({
        "csv": str(args.out),
        "report": str(report_path),
        "lambda2_min": report.lambda2_min,
        "decay_rate": report.decay_rate,
        "relerr_r2": report.relerr_r2,
        "bound_check": report.bound_ok,
        "duration_s": round(report.duration, 3),
    })
    return EXIT_OK


def cmd_spectrum(args) -> int:
    g = load_graph(args.graph)
    s = spectrum(g.laplacian())
    _print_json({
        "n": g.n,
        "edges": g.m,
        "connected": is_connected(g),
        "lambda2": s.fiedler if g.n >= 2 else None,
        "lambda_min": s.min,
        "lambda_max": s.max,
    })
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _config(args)
    report = run_ensemble(cfg, parallelism=args.jobs)
    drift_tol = cfg.n * max(cfg.steps, 1) * 2.0 ** -40
    checks = {
        "conservation": max(s.max_sum_drift for s in report.trials) < drift_tol,
        "forward_invariance": sum(s.box_violations for s in report.trials) == 0,
        "monotone_lyapunov": sum(s.lyapunov_increases for s in report.trials) == 0,
    }
    if report.bound_ok is not None:
        checks["exponential_bound"] = report.bound_ok
    _print_json({"checks": checks, "lambda2_min": report.lambda2_min,
                 "decay_rate": report.decay_rate})
    return EXIT_OK if all(checks.values()) else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoconsensus",
        description="Average consensus over evolutionary graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one trial and write its trajectory")
    _add_config_flags(p)
    p.add_argument("--trial", type=int, default=0, help="trial index (seed stream)")
    p.add_argument("--out", type=Path, help="trajectory CSV path")
    p.add_argument("--dump-graph", type=Path, help="write the feasible graph as JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ensemble", help="Monte Carlo ensemble, CSV curve and JSON report")
    _add_config_flags(p)
    p.add_argument("--out", type=Path, default=Path("ensemble.csv"))
    p.add_argument("--report", type=Path, help="JSON report path (default <out>.json)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("spectrum", help="Laplacian spectrum summary of a dumped graph")
    p.add_argument("--graph", type=Path, required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("check", help="run the invariant checks on a config")
    _add_config_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

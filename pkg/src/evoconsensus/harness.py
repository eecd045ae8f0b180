"""Ensemble orchestration, configuration files and CSV/JSON output."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import FIXED_GRAPH_INDEX, SimConfig, run_trial, seed_mix, trial_rng
from .game import ConfigError
from .metrics import (
    EnsembleCurve,
    bound_check,
    default_fit_window,
    fit_decay_rate,
    log_linear_fit,
)
from .spectral import fiedler_value
from .topology import generate_feasible_graph

CSV_HEADER = ("t", "mean_V", "mean_relerr", "trials")
BOUND_SLACK = 1.1
BOUND_V_FLOOR = 1e-20


class TrialError(RuntimeError):
    """A trial failed; carries what is needed to replay it."""

    def __init__(self, trial_index: int, seed: int, cause: BaseException):
        super().__init__(f"trial {trial_index} (seed {seed}) failed: {cause!r}")
        self.trial_index = trial_index
        self.seed = seed
        self.cause = cause

    def __reduce__(self):
        return type(self), (self.trial_index, self.seed, self.cause)


@dataclass
class TrialSummary:
    trial_index: int
    seed: int
    lambda2: float
    average: float
    final_mean: float
    final_inf_error: float
    max_sum_drift: float
    box_violations: int
    lyapunov_increases: int


@dataclass(eq=False)
class ExperimentReport:
    config: dict
    lambda2: list
    curve: EnsembleCurve
    trials: list = field(default_factory=list)
    decay_rate: float | None = None
    fit_window: tuple | None = None
    relerr_r2: float | None = None
    bound_ok: bool | None = None
    duration: float = 0.0

    @property
    def lambda2_min(self) -> float:
        return min(self.lambda2) if self.lambda2 else float("nan")

    def to_dict(self, include_duration: bool = True) -> dict:
        d = {
            "config": self.config,
            "lambda2": self.lambda2,
            "decay_rate": self.decay_rate,
            "fit_window": list(self.fit_window) if self.fit_window else None,
            "relerr_r2": self.relerr_r2,
            "bound_check": self.bound_ok,
            "trials": [vars(s) for s in self.trials],
            "curve": {
                "t": self.curve.t.tolist(),
                "mean_V": self.curve.mean_V.tolist(),
                "mean_relerr": self.curve.mean_relerr.tolist(),
                "trials": self.curve.trials.tolist(),
            },
        }
        if include_duration:
            d["duration_s"] = self.duration
        return d


def _lambda2(graph) -> float:
    return fiedler_value(graph.laplacian()) if graph.n >= 2 else float("nan")


def _trial_job(args):
    config, index, graph, lam = args
    try:
        tr = run_trial(config, index, graph=graph)
        if lam is None:
            lam = _lambda2(tr.graph)
    except Exception as exc:
        raise TrialError(index, seed_mix(config.master_seed, index), exc) from exc
    summary = TrialSummary(
        trial_index=index,
        seed=tr.seed,
        lambda2=lam,
        average=tr.average,
        final_mean=float(np.mean(tr.x_final)),
        final_inf_error=float(np.max(np.abs(tr.x_final - tr.average))),
        max_sum_drift=tr.max_sum_drift,
        box_violations=tr.box_violations,
        lyapunov_increases=tr.lyapunov_increases,
    )
    # Only what aggregation needs goes back across the process boundary.
    tr.graph = None
    tr.states = None
    return tr, summary


def run_ensemble(config: SimConfig, parallelism: int = 1) -> ExperimentReport:
    """Run trials ``0..trials-1`` and aggregate them in index order.

    Each trial draws its own feasible graph and initial state unless
    ``config.fixed_graph`` pins one graph for all of them. Output does not
    depend on `parallelism`.
    """
    start = time.perf_counter()
    graph = lam = None
    if config.fixed_graph:
        graph = generate_feasible_graph(
            config.n, config.p1, trial_rng(config.master_seed, FIXED_GRAPH_INDEX))
        lam = _lambda2(graph)
    jobs = [(config, i, graph, lam) for i in range(config.trials)]
    if parallelism > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_trial_job, jobs))
    else:
        results = [_trial_job(j) for j in jobs]

    trajectories = [r[0] for r in results]
    summaries = [r[1] for r in results]
    curve = EnsembleCurve.from_trajectories(trajectories)
    report = ExperimentReport(
        config=config.to_dict(),
        lambda2=[s.lambda2 for s in summaries],
        curve=curve,
        trials=summaries,
    )
    try:
        window = default_fit_window(curve)
        report.decay_rate = fit_decay_rate(curve, window)
        report.fit_window = window
        mask = (curve.t >= window[0]) & (curve.t <= window[1])
        report.relerr_r2 = log_linear_fit(curve.t[mask], curve.mean_relerr[mask])[2]
    except ValueError:
        pass
    lam_min = report.lambda2_min
    if lam_min > 0:
        report.bound_ok = bound_check(curve, lam_min, BOUND_SLACK, v_floor=BOUND_V_FLOOR)
    report.duration = time.perf_counter() - start
    return report


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def emit_csv(report_or_curve, path) -> Path:
    """Write the ensemble curve as ``t,mean_V,mean_relerr,trials`` rows."""
    curve = getattr(report_or_curve, "curve", report_or_curve)
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for t, v, r, k in zip(curve.t, curve.mean_V, curve.mean_relerr, curve.trials):
                w.writerow((_fmt(t), _fmt(v), _fmt(r), int(k)))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def read_csv(path) -> EnsembleCurve:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header {rows[0] if rows else None}")
    body = rows[1:]
    if not body:
        return EnsembleCurve.empty()
    cols = list(zip(*body))
    return EnsembleCurve(
        t=np.array(cols[0], dtype=float),
        mean_V=np.array(cols[1], dtype=float),
        mean_relerr=np.array(cols[2], dtype=float),
        trials=np.array(cols[3], dtype=np.int64),
    )


def emit_trajectory_csv(tr, path) -> Path:
    """Per-record trial history; adds ``x_0..x_{n-1}`` columns when snapshots exist."""
    path = Path(path)
    header = ["k", "t", "V", "relerr", "sum", "active_edges"]
    if tr.states is not None:
        header += [f"x_{i}" for i in range(tr.states.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in range(len(tr.k)):
            row = [int(tr.k[r]), _fmt(tr.t[r]), _fmt(tr.V[r]), _fmt(tr.relerr[r]),
                   _fmt(tr.total[r]), int(tr.active_count[r])]
            if tr.states is not None:
                row += [_fmt(v) for v in tr.states[r]]
            w.writerow(row)
    return path


def load_config(path=None, **overrides) -> SimConfig:
    """Build a config from an optional flat JSON file plus overrides.

    Overrides whose value is None are ignored, so unset CLI flags fall
    through to the file and then to the defaults.
    """
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SimConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def report_json(report: ExperimentReport, include_duration: bool = True) -> str:
    def clean(o):
        if isinstance(o, float) and not math.isfinite(o):
            return None
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        return o
    return json.dumps(clean(report.to_dict(include_duration)), indent=2, sort_keys=False)

"""Disagreement, Lyapunov bookkeeping and decay-rate estimation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FIT_SKIP_FRACTION = 0.05
FIT_V_FLOOR = 1e-24
MIN_FIT_POINTS = 10


def disagreement(x) -> np.ndarray:
    """Deviation of each entry from the current average."""
    x = np.asarray(x, dtype=float)
    return x - x.mean()


def lyapunov(e) -> float:
    """Half the squared Euclidean norm."""
    e = np.asarray(e, dtype=float)
    return 0.5 * float(e @ e)


def relative_error(e, e0) -> float:
    n0 = float(np.linalg.norm(e0))
    if n0 == 0.0:
        return 0.0
    return float(np.linalg.norm(e)) / n0


@dataclass(eq=False)
class EnsembleCurve:
    """Trial-averaged disagreement on a common time grid."""

    t: np.ndarray
    mean_V: np.ndarray
    mean_relerr: np.ndarray
    trials: np.ndarray

    def __len__(self):
        return len(self.t)

    @classmethod
    def from_trajectories(cls, trajectories) -> "EnsembleCurve":
        trajectories = list(trajectories)
        if not trajectories:
            return cls.empty()
        t = trajectories[0].t
        for tr in trajectories[1:]:
            if not np.array_equal(tr.t, t):
                raise ValueError("trajectories do not share a time grid")
        # Sum in trial-index order so the result is independent of scheduling.
        V = np.zeros(len(t))
        rel = np.zeros(len(t))
        for tr in trajectories:
            V += tr.V
            rel += tr.relerr
        k = len(trajectories)
        return cls(t.copy(), V / k, rel / k, np.full(len(t), k, dtype=np.int64))

    @classmethod
    def empty(cls) -> "EnsembleCurve":
        return cls(np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0, dtype=np.int64))


def log_linear_fit(t, y):
    """Least squares of ``ln y`` on `t`; returns ``(slope, intercept, r_squared)``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("log-linear fit needs strictly positive values")
    ly = np.log(y)
    A = np.column_stack([t, np.ones_like(t)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * t + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def _window_mask(curve: EnsembleCurve, window) -> np.ndarray:
    lo, hi = window
    return (curve.t >= lo) & (curve.t <= hi)


def fit_decay_rate(curve: EnsembleCurve, window) -> float:
    """Exponential decay rate of the mean Lyapunov value over `window`.

    Fits ``ln(mean_V)`` against time by ordinary least squares on the points
    with ``t_lo <= t <= t_hi`` and returns the negated slope.

    Raises
    ------
    ValueError
        If the window holds fewer than ten points or a non-positive value
        (the ensemble has hit the floating-point floor; shrink the window).
    """
    mask = _window_mask(curve, window)
    if mask.sum() < MIN_FIT_POINTS:
        raise ValueError(f"fit window holds {mask.sum()} points, need {MIN_FIT_POINTS}")
    V = curve.mean_V[mask]
    if np.any(V <= 0):
        raise ValueError("non-positive mean V inside the fit window; shrink the window")
    slope, _, _ = log_linear_fit(curve.t[mask], V)
    return -slope


def default_fit_window(curve: EnsembleCurve, skip: float = FIT_SKIP_FRACTION,
                       v_floor: float = FIT_V_FLOOR):
    """Skip the initial transient and stop before the float floor.

    Returns ``(t_lo, t_hi)``; ``t_hi`` is the last time before mean V first
    drops below `v_floor`.
    """
    if len(curve) == 0:
        raise ValueError("empty curve")
    t = curve.t
    t_lo = t[0] + skip * (t[-1] - t[0])
    below = np.nonzero(curve.mean_V < v_floor)[0]
    t_hi = t[below[0] - 1] if len(below) else t[-1]
    return float(t_lo), float(t_hi)


def bound_check(curve: EnsembleCurve, lambda2: float, slack: float = 1.1,
                v_floor: float | None = None) -> bool:
    """Whether mean V stays under ``slack * V(0) * exp(-lambda2 * t)``.

    With `v_floor` set, only points recorded before mean V first falls below
    the floor are checked.
    """
    if lambda2 <= 0:
        raise ValueError("lambda2 must be positive")
    if len(curve) == 0:
        return True
    V = curve.mean_V
    stop = len(V)
    if v_floor is not None:
        below = np.nonzero(V < v_floor)[0]
        if len(below):
            stop = below[0]
    bound = slack * V[0] * np.exp(-lambda2 * (curve.t[:stop] - curve.t[0]))
    return bool(np.all(V[:stop] <= bound))

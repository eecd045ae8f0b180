"""Continuous-action prisoner's dilemma fitness and link probabilities.

All functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConfigError(ValueError):
    """Invalid simulation or game configuration."""


@dataclass(frozen=True)
class GameParams:
    """Benefit `b` and cost `c` per unit of coordination; needs ``b > c > 0``."""

    b: float = 5.0
    c: float = 4.0

    def __post_init__(self):
        if not (np.isfinite(self.b) and np.isfinite(self.c)):
            raise ConfigError(f"b and c must be finite, got b={self.b}, c={self.c}")
        if not self.b > self.c > 0:
            raise ConfigError(
                f"game requires b > c > 0 (got b={self.b}, c={self.c}); "
                "otherwise link probabilities are not bounded below by 1/2"
            )


def fitness(i, x, state, params: GameParams) -> float:
    """Reward of agent `i`: benefit from active neighbours minus its own cost."""
    nbrs = state.active_neighbors(i)
    x = np.asarray(x, dtype=float)
    return params.b * float(np.sum(x[nbrs])) - params.c * len(nbrs) * float(x[i])


def delta_fitness_create(x_i, x_j, params: GameParams):
    """Fitness change for `i` when it adds a link to `j`."""
    return params.b * x_j - params.c * x_i


def delta_fitness_drop(x_i, x_j, params: GameParams):
    """Fitness change for `i` when it removes its link to `j`."""
    return params.c * x_i - params.b * x_j


def weight_maintain(x_i, x_j, params: GameParams):
    """Probability that an active link survives the step.

    Driven by the summed drop incentive of both endpoints,
    ``(c - b)(x_i + x_j)``; lies in ``[1/2, 1)`` for states in ``[0, 1]``.
    """
    return 0.5 - 0.5 * np.tanh((params.c - params.b) * (x_i + x_j))


def weight_create(x_i, x_j, params: GameParams):
    """Probability that an inactive feasible link is created this step."""
    return 0.5 + 0.5 * np.tanh((params.b - params.c) * (x_i + x_j))

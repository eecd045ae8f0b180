"""Euler-discretised consensus over the evolving topology.

One step of length ``delta`` draws fresh link decisions for every feasible
edge, moves the state along the sampled Laplacian,

    x_{k+1} = x_k - delta * L_k x_k,

and carries the sampled links forward as the next active set. For
``delta <= 1/n`` each update is a convex combination of neighbouring values
(``1 - delta * d_i >= 1/n``), so a state starting in ``[0, 1]^n`` never leaves
it and the disagreement norm never grows. This discrete guarantee is the
package's own; it is checked at every step rather than assumed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .game import ConfigError, GameParams
from .laplacian import laplacian_matvec, next_edge_state, sample_decisions
from .metrics import disagreement, lyapunov, relative_error
from .topology import (
    EdgeState,
    FeasibleGraph,
    generate_feasible_graph,
    init_active_sets,
)

_MASK64 = (1 << 64) - 1
FIXED_GRAPH_INDEX = _MASK64
SNAPSHOT_MAX_N = 200


def splitmix64(z: int) -> int:
    """One round of the SplitMix64 output function (Steele, Lea, Flood 2014)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def seed_mix(master_seed: int, trial_index: int) -> int:
    """64-bit seed of a trial: ``splitmix64(splitmix64(master) ^ index)``."""
    return splitmix64(splitmix64(master_seed & _MASK64) ^ (trial_index & _MASK64))


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_mix(master_seed, trial_index)))


@dataclass(frozen=True)
class SimConfig:
    n: int = 1000
    p1: float = 0.2
    p2: float = 0.2
    b: float = 5.0
    c: float = 4.0
    delta: float | None = None
    steps: int = 1000
    trials: int = 1
    master_seed: int = 0
    record_every: int = 1
    fixed_graph: bool = False
    allow_large_delta: bool = False
    record_states: bool | None = None

    def __post_init__(self):
        self.validate()

    @property
    def dt(self) -> float:
        """Step size; defaults to ``1/n``."""
        return 1.0 / self.n if self.delta is None else float(self.delta)

    @property
    def params(self) -> GameParams:
        return GameParams(self.b, self.c)

    @property
    def snapshots(self) -> bool:
        return self.n <= SNAPSHOT_MAX_N if self.record_states is None else self.record_states

    def validate(self) -> None:
        GameParams(self.b, self.c)
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n}")
        if not 0.0 < self.p1 <= 1.0:
            raise ConfigError(f"p1 must lie in (0, 1], got {self.p1}")
        if not 0.0 <= self.p2 <= 1.0:
            raise ConfigError(f"p2 must lie in [0, 1], got {self.p2}")
        if self.delta is not None:
            if not self.delta > 0:
                raise ConfigError(f"delta must be positive, got {self.delta}")
            if self.delta > 1.0 / self.n and not self.allow_large_delta:
                raise ConfigError(
                    f"delta={self.delta} exceeds 1/n={1.0 / self.n:g}; forward invariance "
                    "is only guaranteed for delta <= 1/n (set allow_large_delta to override)"
                )
        if int(self.steps) != self.steps or self.steps < 0:
            raise ConfigError(f"steps must be a non-negative integer, got {self.steps}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ConfigError(f"record_every must be a positive integer, got {self.record_every}")
        if int(self.master_seed) != self.master_seed or not 0 <= self.master_seed <= _MASK64:
            raise ConfigError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def replace(self, **changes) -> "SimConfig":
        return SimConfig.from_dict({**self.to_dict(), **changes})


def record_steps(steps: int, record_every: int) -> np.ndarray:
    ks = list(range(0, steps + 1, record_every))
    if ks[-1] != steps:
        ks.append(steps)
    return np.array(ks, dtype=np.int64)


@dataclass(eq=False)
class Trajectory:
    """Recorded history of one trial plus per-step invariant diagnostics.

    The diagnostics cover every step, not just the recorded ones:
    `max_sum_drift` is the largest ``|sum(x_k) - sum(x_0)|``,
    `box_violations` counts steps leaving ``[0, 1]^n`` (only tracked when
    ``x_0`` starts inside it) and `lyapunov_increases` counts steps where V
    grew by more than floating-point rounding can explain.
    """

    trial_index: int
    seed: int
    k: np.ndarray
    t: np.ndarray
    V: np.ndarray
    relerr: np.ndarray
    total: np.ndarray
    active_count: np.ndarray
    x0: np.ndarray
    x_final: np.ndarray
    graph: FeasibleGraph
    states: np.ndarray | None = None
    max_sum_drift: float = 0.0
    box_violations: int = 0
    lyapunov_increases: int = 0

    @property
    def average(self) -> float:
        return float(np.mean(self.x0))


def step(x, state: EdgeState, g: FeasibleGraph, params: GameParams, delta: float,
         rng: np.random.Generator):
    """Advance one Euler step; returns ``(x_next, state_next)``."""
    decisions = sample_decisions(g, state, x, params, rng)
    x_next = np.asarray(x, dtype=float) - delta * laplacian_matvec(decisions, x)
    return x_next, next_edge_state(decisions)


def rounding_allowance(V: float, x: np.ndarray) -> float:
    """Largest V increase attributable to rounding in one update of `x`."""
    s = np.finfo(float).eps * max(1.0, float(np.abs(x).max(initial=0.0)))
    n = len(x)
    return 4.0 * s * np.sqrt(2.0 * V * n) + 8.0 * n * s * s


def run_trial(config: SimConfig, trial_index: int, x0=None,
              graph: FeasibleGraph | None = None) -> Trajectory:
    """Simulate one trial from its derived seed.

    Draw order from the trial generator: feasible graph (unless `graph` is
    given or the config pins one), initial active set, initial state (unless
    `x0` is given), then one uniform per feasible edge per step.
    """
    seed = seed_mix(config.master_seed, trial_index)
    rng = np.random.Generator(np.random.PCG64(seed))
    if graph is None:
        if config.fixed_graph:
            graph = generate_feasible_graph(
                config.n, config.p1, trial_rng(config.master_seed, FIXED_GRAPH_INDEX))
        else:
            graph = generate_feasible_graph(config.n, config.p1, rng)
    elif graph.n != config.n:
        raise ValueError(f"graph has {graph.n} vertices, config says n={config.n}")
    state = init_active_sets(graph, config.p2, rng)
    if x0 is None:
        x = rng.random(config.n)
    else:
        x = np.array(x0, dtype=float)
        if x.shape != (config.n,):
            raise ValueError(f"x0 must have shape ({config.n},), got {x.shape}")
    x_init = x.copy()

    params = config.params
    dt = config.dt
    ks = record_steps(config.steps, config.record_every)
    R = len(ks)
    V = np.empty(R)
    rel = np.empty(R)
    total = np.empty(R)
    active = np.empty(R, dtype=np.int64)
    states = np.empty((R, config.n)) if config.snapshots else None

    e0 = disagreement(x)
    sum0 = float(x.sum())
    in_box = bool(np.all((x >= 0.0) & (x <= 1.0)))
    v_prev = lyapunov(e0)
    drift = 0.0
    box_bad = 0
    v_up = 0

    r = 0
    for k in range(config.steps + 1):
        if k == ks[r]:
            e = disagreement(x)
            V[r] = lyapunov(e)
            rel[r] = relative_error(e, e0)
            total[r] = x.sum()
            active[r] = state.active_count()
            if states is not None:
                states[r] = x
            r += 1
        if k == config.steps:
            break
        x_next, state = step(x, state, graph, params, dt, rng)
        drift = max(drift, abs(float(x_next.sum()) - sum0))
        if in_box and not np.all((x_next >= 0.0) & (x_next <= 1.0)):
            box_bad += 1
        v_next = lyapunov(disagreement(x_next))
        if v_next > v_prev + rounding_allowance(v_prev, x):
            v_up += 1
        v_prev = v_next
        x = x_next

    return Trajectory(
        trial_index=trial_index, seed=seed, k=ks, t=ks * dt, V=V, relerr=rel,
        total=total, active_count=active, x0=x_init, x_final=x, graph=graph,
        states=states, max_sum_drift=drift, box_violations=box_bad,
        lyapunov_increases=v_up,
    )


def conservation_check(trajectory: Trajectory) -> float:
    """Largest deviation of the recorded state sum from its initial value."""
    return float(np.max(np.abs(trajectory.total - trajectory.total[0])))

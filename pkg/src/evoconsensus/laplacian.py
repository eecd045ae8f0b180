"""Expected and sampled Laplacians of the evolving topology.

Per step every feasible edge receives exactly one Bernoulli decision: an
active edge is maintained or dropped, an inactive one is created or not. One
uniform is drawn per edge in canonical edge order, so a single record serves
both endpoints and runs are reproducible from the generator state alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import GameParams, weight_create, weight_maintain
from .topology import EdgeState, FeasibleGraph


@dataclass(eq=False)
class EdgeDecisions:
    """Realised link decisions for one step.

    ``chi[k]`` is the 0/1 outcome for ``graph.edges[k]``; ``maintain[k]`` tags
    whether it was a maintain decision (edge was active) or a create decision.
    """

    graph: FeasibleGraph
    chi: np.ndarray
    maintain: np.ndarray

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def sampled_edges(self) -> np.ndarray:
        return self.graph.edges[self.chi]


def edge_weights(g: FeasibleGraph, state: EdgeState, x, params: GameParams) -> np.ndarray:
    """Success probability of each feasible edge's decision, in edge order."""
    x = np.asarray(x, dtype=float)
    i, j = g.edges.T
    xi, xj = x[i], x[j]
    return np.where(state.active,
                    weight_maintain(xi, xj, params),
                    weight_create(xi, xj, params))


def _assemble(n: int, edges: np.ndarray, w: np.ndarray) -> np.ndarray:
    L = np.zeros((n, n))
    i, j = edges.T
    L[i, j] = -w
    L[j, i] = -w
    L[np.diag_indices(n)] = -L.sum(axis=1)
    return L


def weighted_laplacian(g: FeasibleGraph, state: EdgeState, x, params: GameParams) -> np.ndarray:
    """Conditional expectation of the sampled Laplacian given `x` and `state`.

    Off-diagonal ``(i, j)`` is minus the maintain weight for active edges,
    minus the create weight for inactive feasible edges and zero otherwise;
    the diagonal makes every row sum to zero.
    """
    return _assemble(g.n, g.edges, edge_weights(g, state, x, params))


def sample_decisions(g: FeasibleGraph, state: EdgeState, x, params: GameParams,
                     rng: np.random.Generator | None = None, uniforms=None) -> EdgeDecisions:
    """Draw one Bernoulli decision per feasible edge.

    ``chi = 1`` iff ``u < w`` with `u` uniform on ``[0, 1)``. Pass `uniforms`
    to supply the ``u`` values directly instead of drawing from `rng`.
    """
    w = edge_weights(g, state, x, params)
    if uniforms is None:
        if rng is None:
            raise ValueError("either rng or uniforms is required")
        u = rng.random(g.m)
    else:
        u = np.asarray(uniforms, dtype=float)
        if u.shape != (g.m,):
            raise ValueError(f"expected {g.m} uniforms, got shape {u.shape}")
    return EdgeDecisions(g, u < w, state.active.copy())


def laplacian_of(decisions: EdgeDecisions, n: int | None = None) -> np.ndarray:
    """Dense 0/1 Laplacian of the sampled links."""
    n = decisions.n if n is None else n
    return _assemble(n, decisions.sampled_edges, np.ones(int(decisions.chi.sum())))


def laplacian_matvec(decisions: EdgeDecisions, x) -> np.ndarray:
    """``L @ x`` for the sampled Laplacian, computed edge by edge."""
    x = np.asarray(x, dtype=float)
    i, j = decisions.sampled_edges.T
    flow = x[i] - x[j]
    n = decisions.n
    return np.bincount(i, flow, minlength=n) - np.bincount(j, flow, minlength=n)


def next_edge_state(decisions: EdgeDecisions) -> EdgeState:
    """Links with ``chi = 1`` (maintained or created) are active next step."""
    return EdgeState(decisions.graph, decisions.chi.copy())


def check_laplacian(L, atol: float = 1e-12) -> np.ndarray:
    """Validate symmetry and zero row sums; returns `L` as a float array."""
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"Laplacian must be square, got shape {L.shape}")
    scale = max(1.0, float(np.abs(L).max(initial=0.0)))
    if not np.allclose(L, L.T, rtol=0.0, atol=atol * scale):
        raise ValueError("Laplacian is not symmetric")
    if np.abs(L.sum(axis=1)).max(initial=0.0) > atol * scale * max(1, L.shape[0]):
        raise ValueError("Laplacian rows do not sum to zero")
    return L


def to_csv(L, path) -> None:
    """Dense row-major CSV with 17 significant digits, for debugging."""
    L = np.asarray(L, dtype=float)
    with open(path, "w", newline="\n") as fh:
        for row in L:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

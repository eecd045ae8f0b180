"""Feasible interaction graphs and the active/inactive edge partition.

A :class:`FeasibleGraph` holds the fixed set of pairs that may ever interact.
Edges are stored once, as ``(i, j)`` with ``i < j``, sorted lexicographically;
every per-edge array elsewhere in the package is aligned with that order.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAX_CONNECT_ATTEMPTS = 1000


class GraphGenerationError(RuntimeError):
    """Raised when no connected feasible graph could be drawn."""


@dataclass(frozen=True, eq=False)
class FeasibleGraph:
    """Undirected simple graph on vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : array_like of shape (m, 2)
        Unordered vertex pairs. They are canonicalised to ``i < j`` and
        sorted; duplicates and self-loops are rejected.
    """

    n: int
    edges: np.ndarray
    neighbors: tuple = field(init=False, repr=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        e = np.sort(e, axis=1)
        e = e[np.lexsort((e[:, 1], e[:, 0]))]
        if len(e) > 1 and np.any(np.all(e[1:] == e[:-1], axis=1)):
            raise ValueError("duplicate edges")
        e.setflags(write=False)

        nbrs = [[] for _ in range(n)]
        for i, j in e.tolist():
            nbrs[i].append(j)
            nbrs[j].append(i)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "neighbors", tuple(tuple(sorted(a)) for a in nbrs))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def feasible_edges(self) -> set:
        return {(int(i), int(j)) for i, j in self.edges}

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.neighbors], dtype=np.int64)

    def laplacian(self) -> np.ndarray:
        """Dense unweighted Laplacian ``D - A`` of the feasible graph."""
        L = np.zeros((self.n, self.n))
        i, j = self.edges.T
        L[i, j] = -1.0
        L[j, i] = -1.0
        L[np.diag_indices(self.n)] = self.degrees()
        return L

    def __eq__(self, other):
        if not isinstance(other, FeasibleGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": self.edges.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "FeasibleGraph":
        return cls(int(d["n"]), np.asarray(d["edges"], dtype=np.int64).reshape(-1, 2))


def dump_graph(g: FeasibleGraph, path) -> None:
    Path(path).write_text(json.dumps(g.to_dict(), separators=(",", ":")) + "\n")


def load_graph(path) -> FeasibleGraph:
    return FeasibleGraph.from_dict(json.loads(Path(path).read_text()))


@dataclass(eq=False)
class EdgeState:
    """Active-edge mask aligned with ``graph.edges``.

    The inactive set is the complement of the mask, so the partition of the
    feasible edges is exact by construction.
    """

    graph: FeasibleGraph
    active: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.active, dtype=bool)
        if a.shape != (self.graph.m,):
            raise ValueError(f"mask has shape {a.shape}, expected ({self.graph.m},)")
        self.active = a

    @property
    def inactive(self) -> np.ndarray:
        return ~self.active

    def active_edges(self) -> set:
        return {(int(i), int(j)) for i, j in self.graph.edges[self.active]}

    def active_count(self) -> int:
        return int(np.count_nonzero(self.active))

    def active_neighbors(self, i: int) -> list:
        e = self.graph.edges[self.active]
        return sorted(e[e[:, 0] == i, 1].tolist() + e[e[:, 1] == i, 0].tolist())

    @classmethod
    def from_edges(cls, graph: FeasibleGraph, active_edges) -> "EdgeState":
        wanted = {tuple(sorted(map(int, e))) for e in active_edges}
        unknown = wanted - graph.feasible_edges
        if unknown:
            raise ValueError(f"edges not feasible: {sorted(unknown)}")
        mask = np.array([(int(i), int(j)) in wanted for i, j in graph.edges], dtype=bool)
        return cls(graph, mask)


def complete_graph(n: int) -> FeasibleGraph:
    i, j = np.triu_indices(n, k=1)
    return FeasibleGraph(n, np.column_stack([i, j]))


def path_graph(n: int) -> FeasibleGraph:
    i = np.arange(n - 1)
    return FeasibleGraph(n, np.column_stack([i, i + 1]))


def sample_bernoulli_graph(n: int, p1: float, rng: np.random.Generator) -> FeasibleGraph:
    """One draw of the independent-pair model, connected or not.

    Exactly ``n(n-1)/2`` uniforms are consumed, in lexicographic pair order.
    """
    i, j = np.triu_indices(n, k=1)
    keep = rng.random(len(i)) < p1
    return FeasibleGraph(n, np.column_stack([i[keep], j[keep]]))


def is_connected(g: FeasibleGraph) -> bool:
    """Breadth-first search from vertex 0 reaches every vertex."""
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        v = queue.popleft()
        for w in g.neighbors[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(w)
    return count == g.n


def generate_feasible_graph(n: int, p1: float, rng: np.random.Generator,
                            max_attempts: int = MAX_CONNECT_ATTEMPTS) -> FeasibleGraph:
    """Draw a connected Bernoulli random graph.

    Every unordered pair is kept independently with probability `p1`; draws
    that come out disconnected are discarded and the graph alone is redrawn.

    Raises
    ------
    GraphGenerationError
        If `max_attempts` consecutive draws are all disconnected.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0.0 < p1 <= 1.0:
        raise ValueError(f"p1 must lie in (0, 1], got {p1}")
    for _ in range(max_attempts):
        g = sample_bernoulli_graph(n, p1, rng)
        if is_connected(g):
            return g
    raise GraphGenerationError(
        f"no connected graph after {max_attempts} attempts with n={n}, p1={p1}; "
        f"p1 is too small for connectivity (ln(n)/n = {np.log(max(n, 2)) / n:.3g})"
    )


def init_active_sets(g: FeasibleGraph, p2: float, rng: np.random.Generator) -> EdgeState:
    """Mark each feasible edge active independently with probability `p2`."""
    if not 0.0 <= p2 <= 1.0:
        raise ValueError(f"p2 must lie in [0, 1], got {p2}")
    return EdgeState(g, rng.random(g.m) < p2)

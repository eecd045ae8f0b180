import json
from math import comb, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evoconsensus.topology import (
    EdgeState,
    FeasibleGraph,
    GraphGenerationError,
    complete_graph,
    dump_graph,
    generate_feasible_graph,
    init_active_sets,
    is_connected,
    load_graph,
    path_graph,
    sample_bernoulli_graph,
)


def test_complete_probability_one_two_vertices():
    g = generate_feasible_graph(2, 1.0, np.random.default_rng(99))
    assert g.feasible_edges == {(0, 1)}


def test_complete_probability_one_four_vertices():
    g = generate_feasible_graph(4, 1.0, np.random.default_rng(3))
    assert g.m == 6
    assert g == complete_graph(4)


def test_golden_graph_n50(data_dir):
    g = generate_feasible_graph(50, 0.2, np.random.default_rng(7))
    assert is_connected(g)
    assert 148 <= g.m <= 343
    # 5 sigma of Binomial(1225, 0.2)
    mean, sd = comb(50, 2) * 0.2, sqrt(comb(50, 2) * 0.2 * 0.8)
    assert mean - 5 * sd <= g.m <= mean + 5 * sd
    golden = load_graph(data_dir / "graph_n50_p0.2_seed7.json")
    assert g == golden


def test_generation_is_deterministic():
    a = generate_feasible_graph(30, 0.3, np.random.default_rng(5))
    b = generate_feasible_graph(30, 0.3, np.random.default_rng(5))
    assert a == b


def test_retry_cap():
    with pytest.raises(GraphGenerationError, match="too small"):
        generate_feasible_graph(40, 0.001, np.random.default_rng(0), max_attempts=20)


@pytest.mark.parametrize("p1", [0.0, -0.1, 1.5])
def test_invalid_p1(p1):
    with pytest.raises(ValueError):
        generate_feasible_graph(5, p1, np.random.default_rng(0))


def test_is_connected_examples():
    assert is_connected(complete_graph(3))
    assert not is_connected(FeasibleGraph(2, np.zeros((0, 2))))
    assert not is_connected(FeasibleGraph(3, [(0, 1)]))
    assert is_connected(path_graph(3))
    assert is_connected(FeasibleGraph(1, np.zeros((0, 2))))


def test_canonical_edge_order():
    g = FeasibleGraph(4, [(3, 1), (2, 0), (1, 0)])
    assert g.edges.tolist() == [[0, 1], [0, 2], [1, 3]]
    assert g.neighbors == ((1, 2), (0, 3), (0,), (1,))


@pytest.mark.parametrize("edges", [[(1, 1)], [(0, 1), (1, 0)], [(0, 5)]])
def test_invalid_edges_rejected(edges):
    with pytest.raises(ValueError):
        FeasibleGraph(3, edges)


def test_json_roundtrip(tmp_path):
    g = generate_feasible_graph(12, 0.4, np.random.default_rng(1))
    p = tmp_path / "g.json"
    dump_graph(g, p)
    d = json.loads(p.read_text())
    assert d["n"] == 12
    assert d["edges"] == sorted(d["edges"])
    assert all(i < j for i, j in d["edges"])
    assert load_graph(p) == g


def test_init_active_extremes():
    g = complete_graph(5)
    rng = np.random.default_rng(0)
    assert init_active_sets(g, 0.0, rng).active_edges() == set()
    assert init_active_sets(g, 1.0, rng).active_edges() == g.feasible_edges


def test_init_active_mean_count():
    g = complete_graph(4)
    rng = np.random.default_rng(2024)
    counts = [init_active_sets(g, 0.5, rng).active_count() for _ in range(100_000)]
    assert np.mean(counts) == pytest.approx(3.0, abs=0.02)


def test_edge_count_matches_binomial():
    # raw draws, without the connectivity filter
    n, p, trials = 10, 0.3, 10_000
    N = comb(n, 2)
    rng = np.random.default_rng(77)
    counts = np.array([sample_bernoulli_graph(n, p, rng).m for _ in range(trials)])
    sd_mean = sqrt(N * p * (1 - p) / trials)
    assert abs(counts.mean() - N * p) < 5 * sd_mean
    # variance of the sample variance for a binomial is ~ 2 sigma^4 / trials
    var = N * p * (1 - p)
    assert abs(counts.var(ddof=1) - var) < 5 * var * sqrt(2 / trials)


def test_edge_state_from_edges():
    g = path_graph(4)
    s = EdgeState.from_edges(g, [(2, 1)])
    assert s.active.tolist() == [False, True, False]
    assert s.active_neighbors(1) == [2]
    with pytest.raises(ValueError):
        EdgeState.from_edges(g, [(0, 3)])


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 25), p1=st.floats(0.3, 1.0), p2=st.floats(0.0, 1.0),
       seed=st.integers(0, 2**32 - 1))
def test_generated_graphs_are_connected(n, p1, p2, seed):
    rng = np.random.default_rng(seed)
    g = generate_feasible_graph(n, p1, rng)
    assert is_connected(g)
    s = init_active_sets(g, p2, rng)
    assert s.active_edges() <= g.feasible_edges

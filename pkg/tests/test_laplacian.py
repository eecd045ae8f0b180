import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evoconsensus.game import GameParams
from evoconsensus.laplacian import (
    EdgeDecisions,
    check_laplacian,
    laplacian_matvec,
    laplacian_of,
    next_edge_state,
    sample_decisions,
    to_csv,
    weighted_laplacian,
)
from evoconsensus.topology import (
    EdgeState,
    FeasibleGraph,
    complete_graph,
    generate_feasible_graph,
    init_active_sets,
    path_graph,
)

P = GameParams(5.0, 4.0)
W2 = 0.98201379003790844  # 0.5 + 0.5 tanh(2), mpmath


def decisions(g, chi, maintain=None):
    chi = np.asarray(chi, dtype=bool)
    maintain = np.zeros_like(chi) if maintain is None else np.asarray(maintain, dtype=bool)
    return EdgeDecisions(g, chi, maintain)


def test_weighted_two_vertices():
    g = complete_graph(2)
    W = weighted_laplacian(g, EdgeState(g, [True]), [0.0, 0.0], P)
    np.testing.assert_array_equal(W, [[0.5, -0.5], [-0.5, 0.5]])


def test_weighted_no_edges():
    g = FeasibleGraph(2, np.zeros((0, 2)))
    W = weighted_laplacian(g, EdgeState(g, []), [0.3, 0.4], P)
    np.testing.assert_array_equal(W, np.zeros((2, 2)))


def test_weighted_path_mixed_roles():
    g = path_graph(3)
    s = EdgeState.from_edges(g, [(0, 1)])
    W = weighted_laplacian(g, s, [1.0, 1.0, 1.0], P)
    expected = np.array([[W2, -W2, 0], [-W2, 2 * W2, -W2], [0, -W2, W2]])
    np.testing.assert_allclose(W, expected, rtol=1e-15, atol=0)


def test_threshold_semantics():
    g = complete_graph(2)
    s = EdgeState(g, [True])
    assert sample_decisions(g, s, [0, 0], P, uniforms=[0.49]).chi.tolist() == [True]
    assert sample_decisions(g, s, [0, 0], P, uniforms=[0.5]).chi.tolist() == [False]


def test_empty_feasible_set():
    g = FeasibleGraph(3, np.zeros((0, 2)))
    d = sample_decisions(g, EdgeState(g, []), np.zeros(3), P, np.random.default_rng(0))
    assert d.chi.size == 0
    np.testing.assert_array_equal(laplacian_of(d), np.zeros((3, 3)))


def test_roles_follow_active_set():
    g = path_graph(3)
    s = EdgeState.from_edges(g, [(1, 2)])
    d = sample_decisions(g, s, np.ones(3), P, np.random.default_rng(0))
    assert d.maintain.tolist() == [False, True]


def test_sample_mean_matches_weight():
    g = complete_graph(4)
    s = init_active_sets(g, 0.5, np.random.default_rng(1))
    rng = np.random.default_rng(8)
    N = 100_000
    acc = np.zeros(g.m)
    for _ in range(N):
        acc += sample_decisions(g, s, np.ones(4), P, rng).chi
    sigma = np.sqrt(W2 * (1 - W2) / N)
    assert np.all(np.abs(acc / N - W2) < 4 * sigma)


def test_laplacian_of_examples():
    g2 = complete_graph(2)
    np.testing.assert_array_equal(laplacian_of(decisions(g2, [0])), np.zeros((2, 2)))
    np.testing.assert_array_equal(laplacian_of(decisions(g2, [1])), [[1, -1], [-1, 1]])
    g3 = complete_graph(3)  # edges (0,1), (0,2), (1,2)
    L = laplacian_of(decisions(g3, [1, 0, 1]))
    np.testing.assert_array_equal(L, [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])


def test_next_edge_state():
    g = path_graph(3)
    assert next_edge_state(decisions(g, [1, 1])).active_edges() == g.feasible_edges
    assert next_edge_state(decisions(g, [0, 0])).active_edges() == set()
    # (0,1) active but dropped, (1,2) inactive but created
    d = decisions(g, [0, 1], maintain=[1, 0])
    assert next_edge_state(d).active_edges() == {(1, 2)}


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 12), seed=st.integers(0, 2**32 - 1))
def test_sampled_laplacian_is_valid(n, seed):
    rng = np.random.default_rng(seed)
    g = generate_feasible_graph(n, 0.6, rng)
    s = init_active_sets(g, 0.3, rng)
    x = rng.random(n)
    L = laplacian_of(sample_decisions(g, s, x, P, rng))
    check_laplacian(L)
    assert np.all(L == np.round(L))
    off = L[~np.eye(n, dtype=bool)]
    assert np.all(off <= 0) and np.all(np.diag(L) >= 0)
    assert np.linalg.eigvalsh(L).min() > -1e-9 * n


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 12), seed=st.integers(0, 2**32 - 1))
def test_weighted_entries_bounded_on_feasible_edges(n, seed):
    rng = np.random.default_rng(seed)
    g = generate_feasible_graph(n, 0.5, rng)
    s = init_active_sets(g, 0.5, rng)
    W = weighted_laplacian(g, s, rng.random(n), P)
    check_laplacian(W)
    i, j = g.edges.T
    assert np.all((W[i, j] >= -1) & (W[i, j] <= -0.5))
    feasible = np.zeros((n, n), dtype=bool)
    feasible[i, j] = feasible[j, i] = True
    np.fill_diagonal(feasible, True)
    assert np.all(W[~feasible] == 0)


def test_matvec_matches_dense():
    rng = np.random.default_rng(4)
    g = generate_feasible_graph(20, 0.4, rng)
    s = init_active_sets(g, 0.2, rng)
    x = rng.random(20)
    d = sample_decisions(g, s, x, P, rng)
    np.testing.assert_allclose(laplacian_matvec(d, x), laplacian_of(d) @ x, atol=1e-14)


def test_expected_laplacian_small_sample():
    rng = np.random.default_rng(31)
    g = generate_feasible_graph(6, 0.7, rng)
    s = init_active_sets(g, 0.5, rng)
    x = rng.random(6)
    W = weighted_laplacian(g, s, x, P)
    N = 20_000
    acc = sum(laplacian_of(sample_decisions(g, s, x, P, rng)) for _ in range(N)) / N
    off = ~np.eye(6, dtype=bool)
    assert np.all(np.abs(acc - W)[off] < 4 * np.sqrt(0.25 / N))
    # a diagonal entry sums deg(i) independent decisions
    deg = g.degrees()
    assert np.all(np.abs(np.diag(acc - W)) < 4 * np.sqrt(0.25 * np.maximum(deg, 1) / N))


def test_check_laplacian_rejects():
    with pytest.raises(ValueError, match="symmetric"):
        check_laplacian([[1, -1], [0, 0]])
    with pytest.raises(ValueError, match="sum to zero"):
        check_laplacian([[1, 0], [0, 1]])


def test_csv_export(tmp_path):
    L = np.array([[0.1, -0.1], [-0.1, 0.1]])
    to_csv(L, tmp_path / "L.csv")
    text = (tmp_path / "L.csv").read_bytes()
    assert text == b"0.10000000000000001,-0.10000000000000001\n-0.10000000000000001,0.10000000000000001\n"
    np.testing.assert_array_equal(np.loadtxt(tmp_path / "L.csv", delimiter=","), L)

import numpy as np
from pytest import raises

from dyndist import (
    ShapeMismatch,
    extend_to_long_hops,
    make_rng,
    minplus_approx,
    minplus_exact,
    minplus_power,
    sample_hitting_set,
)
from dyndist.generator import gnp_graph, strongly_connected_graph
from dyndist.minplus import layer_eps
from dyndist.oracle import dijkstra_apsp
from dyndist.types import INF

TOLERANCE = 1e-9


def _random_distances(rows: int, cols: int, seed: int, missing: float = 0.2) -> np.ndarray:
    rng = make_rng(seed)
    values = rng.uniform(0.5, 40.0, size=(rows, cols))
    values[rng.random((rows, cols)) < missing] = INF
    return values


def _brute(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    result = np.full((a.shape[0], b.shape[1]), INF)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                result[i, j] = min(result[i, j], a[i, k] + b[k, j])
    return result


def _assert_ratio(estimate: np.ndarray, truth: np.ndarray, eps: float):
    assert np.array_equal(np.isinf(estimate), np.isinf(truth))
    finite = np.isfinite(truth) & (truth > 0)
    ratio = estimate[finite] / truth[finite]
    assert ratio.min() >= 1 - TOLERANCE
    assert ratio.max() <= 1 + eps + TOLERANCE
    assert np.all(estimate[truth == 0] == 0)


def test_minplus_exact():
    a = _random_distances(16, 9, 1)
    b = _random_distances(9, 16, 2)
    assert np.array_equal(minplus_exact(a, b), _brute(a, b))
    assert minplus_exact(np.zeros((2, 0)), np.zeros((0, 3))).tolist() == [[INF] * 3] * 2
    with raises(ShapeMismatch):
        minplus_exact(a, a)


def test_minplus_exact_spans_row_chunks():
    a = _random_distances(130, 5, 3)
    b = _random_distances(5, 4, 4)
    assert np.array_equal(minplus_exact(a, b), _brute(a, b))


def test_minplus_approx_ratio():
    a = _random_distances(16, 16, 5)
    b = _random_distances(16, 16, 6)
    a[3, 3] = 0.0
    truth = minplus_exact(a, b)
    for eps in (0.05, 0.25, 1.0):
        _assert_ratio(minplus_approx(a, b, eps), truth, eps)
    with raises(ValueError):
        minplus_approx(a, b, 0)
    with raises(ShapeMismatch):
        minplus_approx(a, b[:3], 0.5)


def test_minplus_approx_degenerate_inputs():
    zeros = np.zeros((3, 3))
    assert np.array_equal(minplus_approx(zeros, zeros, 0.5), zeros)
    empty = np.full((2, 2), INF)
    assert np.all(np.isinf(minplus_approx(empty, empty, 0.5)))


def test_minplus_power_matches_shortest_paths():
    eps = 0.5
    graph = gnp_graph(16, 0.15, rng=make_rng(7))
    dist, _ = dijkstra_apsp(graph)
    adjacency = np.full((16, 16), INF)
    for u, v, w in graph.arcs():
        adjacency[u, v] = w
    _assert_ratio(minplus_power(adjacency, eps), dist, eps)
    assert minplus_power(np.array([[5.0]]), eps).tolist() == [[0.0]]
    with raises(ShapeMismatch):
        minplus_power(np.zeros((2, 3)), eps)


def test_layer_eps():
    assert layer_eps(0.8, 4) == 0.1
    assert layer_eps(0.8, 0) == 0.4


def test_extend_to_long_hops():
    eps = 0.5
    graph = strongly_connected_graph(20, 0.05, rng=make_rng(8))
    dist, _ = dijkstra_apsp(graph)
    hop_limited = np.full((20, 20), INF)
    np.fill_diagonal(hop_limited, 0.0)
    for u, v, w in graph.arcs():
        hop_limited[u, v] = min(hop_limited[u, v], w)

    everything = np.arange(20)
    _assert_ratio(extend_to_long_hops(hop_limited, everything, eps), dist, eps)

    hubs = sample_hitting_set(20, 2, rng=make_rng(9))
    through_hubs = extend_to_long_hops(dist, hubs, eps)
    assert np.all(through_hubs >= dist * (1 - TOLERANCE))

    closure = minplus_power(dist[np.ix_(everything, everything)], eps / 6)
    _assert_ratio(extend_to_long_hops(dist, everything, eps, closure=closure), dist, eps)
    assert np.all(np.isinf(extend_to_long_hops(dist, np.array([], dtype=np.int64), eps)))
    with raises(ShapeMismatch):
        extend_to_long_hops(dist[:3], everything, eps)

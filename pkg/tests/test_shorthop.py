import numpy as np
from pytest import raises

from dyndist import (
    CommandKind,
    DistributionWeight,
    DynGraph,
    IndexOutOfRange,
    LogLevel,
    ScaledOracleBank,
    ShortHopOracle,
    logging,
    make_rng,
    threshold_set,
)
from dyndist.generator import gnp_graph, path_graph, random_connected_graph, random_stream
from dyndist.oracle import dijkstra_apsp
from dyndist.shorthop import scaled_weight
from dyndist.types import INF

logging.level = LogLevel.debug

TOLERANCE = 1e-9


def _assert_bounded(estimate: np.ndarray, truth: np.ndarray, eps: float, bound: float):
    tracked = truth <= bound
    assert np.all(np.isinf(estimate[~tracked]))
    assert np.all(estimate[tracked] >= truth[tracked])
    assert np.all(estimate[tracked] <= (1 + eps) * truth[tracked] * (1 + TOLERANCE))


def test_threshold_set():
    assert threshold_set(0.5, 1) == [1]
    assert threshold_set(0.5, 0) == []
    assert threshold_set(1.0, 10) == [1, 2, 4, 8, 10]
    for eps in (0.1, 0.5, 2.0):
        thresholds = threshold_set(eps, 100)
        assert thresholds[-1] == 100
        assert thresholds == sorted(set(thresholds))
        for x in range(1, 101):
            assert any(x <= d <= (1 + eps) * x for d in thresholds)
    with raises(ValueError):
        threshold_set(0, 10)


def test_scaled_weight():
    assert scaled_weight(3, 10, 4) == 8
    assert scaled_weight(4, 10, 4) == 10
    assert scaled_weight(5, 10, 4) == INF
    assert scaled_weight(INF, 10, 4) == INF
    assert scaled_weight(1.5, 3, 1) == INF


def test_short_hop_oracle_under_updates():
    for wrapped in (True, False):
        graph = gnp_graph(10, 0.2, rng=make_rng(1))
        eps = 0.5
        oracle = ShortHopOracle(graph, eps=eps, mu=0.5, bound=8, rng=make_rng(2), wrapped=wrapped)
        everything = list(range(10))
        stream = random_stream(graph, 40, rng=make_rng(3), update_share=0.7)
        for command in stream:
            if command.kind == CommandKind.update:
                oracle.update(command.u, command.v, command.w)
                graph.set_weight(command.u, command.v, command.w)
                continue
            truth, _ = dijkstra_apsp(graph)
            _assert_bounded(oracle.batch_query(everything, everything), truth, eps, 8)
            rows, cols = list(command.rows), list(command.cols)
            _assert_bounded(oracle.batch_query(rows, cols), truth[np.ix_(rows, cols)], eps, 8)


def test_short_hop_oracle_undirected():
    graph = random_connected_graph(9, 0.1, rng=make_rng(4))
    oracle = ShortHopOracle(graph, eps=0.25, bound=12, rng=make_rng(5))
    truth, _ = dijkstra_apsp(graph)
    everything = list(range(9))
    _assert_bounded(oracle.batch_query(everything, everything), truth, 0.25, 12)
    edge = next(graph.edges())
    oracle.update(edge[1], edge[0], INF)
    graph.set_weight(edge[0], edge[1], INF)
    truth, _ = dijkstra_apsp(graph)
    _assert_bounded(oracle.batch_query(everything, everything), truth, 0.25, 12)
    assert np.array_equal(oracle.reachable(everything, everything), truth <= 12)


def test_short_hop_oracle_single_pairs():
    oracle = ShortHopOracle(path_graph(5), eps=0.5, bound=4, rng=make_rng(6))
    assert oracle.distance(2, 2) == 0
    assert oracle.distance(0, 1) == 1
    assert 4 <= oracle.distance(0, 4) <= 6
    assert oracle.distance(4, 0) == oracle.distance(0, 4)
    oracle.update(1, 2, INF)
    assert oracle.distance(0, 4) == INF
    oracle.update(2, 1, 1)
    assert oracle.distance(0, 2) == 2
    with raises(ValueError, match="integer"):
        oracle.update(0, 2, 1.5)
    with raises(IndexOutOfRange):
        oracle.batch_query([1, 0], [0])


def test_short_hop_oracle_explicit_thresholds():
    oracle = ShortHopOracle(path_graph(6, directed=True), bound=5, thresholds=[2], rng=make_rng(7))
    assert oracle.thresholds == [2, 5]
    result = oracle.batch_query([0], [1, 2, 3, 5])
    assert result.tolist() == [[2.0, 2.0, 5.0, 5.0]]


def test_scaled_bank_real_weights():
    eps = 0.5
    rng = make_rng(8)
    weights = DistributionWeight("uniform", {"low": 1.0, "high": 4.0}, rng, integral=False)
    graph = gnp_graph(8, 0.3, weights=weights, rng=rng)
    bank = ScaledOracleBank(graph, eps=eps, hop_bound=3, rng=make_rng(9))
    assert bank.scales[0] == 1
    assert bank.scales[-1] >= 8 * graph.max_weight()
    everything = list(range(8))
    for step in range(4):
        truth, hops = dijkstra_apsp(graph)
        estimate = bank.batch_query(everything, everything)
        finite = np.isfinite(estimate)
        assert np.all(estimate[finite] >= truth[finite] * (1 - TOLERANCE))
        short = hops <= 3
        assert np.all(estimate[short] <= (1 + eps) * truth[short] * (1 + TOLERANCE))
        u, v, w = list(graph.arcs())[step]
        new = INF if step % 2 else w + 0.75
        bank.update(u, v, new)
        graph.set_weight(u, v, new)
    assert bank.distance(3, 3) == 0


def test_scaled_bank_matches_integer_oracle_on_unit_weights():
    graph = DynGraph(4, edges=[(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    bank = ScaledOracleBank(graph, eps=0.5, hop_bound=3, rng=make_rng(10))
    truth, _ = dijkstra_apsp(graph)
    estimate = bank.batch_query([0, 1, 2, 3], [0, 1, 2, 3])
    _assert_bounded(estimate, truth, 0.5, INF)

from math import log

import numpy as np
from pytest import raises

from dyndist import (
    AdaptiveAdversary,
    APSPOracle,
    CommandKind,
    DirectedInput,
    DynGraph,
    IndexOutOfRange,
    LogLevel,
    ScaledOracleBank,
    ShortHopOracle,
    SSSPOracle,
    UndirectedOracle,
    logging,
    make_rng,
)
from dyndist.generator import cycle_graph, path_graph, random_connected_graph, random_stream, strongly_connected_graph
from dyndist.longrange import build_short_hop, hop_bound
from dyndist.oracle import dijkstra_apsp
from dyndist.types import INF

logging.level = LogLevel.debug

TOLERANCE = 1e-9


def _assert_sandwich(estimate: np.ndarray, truth: np.ndarray, eps: float):
    assert np.array_equal(np.isinf(estimate), np.isinf(truth))
    finite = np.isfinite(truth)
    assert np.all(estimate[finite] >= truth[finite] * (1 - TOLERANCE))
    assert np.all(estimate[finite] <= (1 + eps) * truth[finite] * (1 + TOLERANCE))


def test_hop_bound():
    assert hop_bound(1, 0.5) == 1
    assert hop_bound(16, 0.5) == 4
    assert hop_bound(17, 0.5) == 5
    assert hop_bound(10, 0.0) == 1


def test_build_short_hop_picks_by_weights():
    graph = cycle_graph(6, weight=2)
    rng = make_rng(0)
    oracle = build_short_hop(graph, 0.5, 0.5, 0.5, None, None, rng, True)
    assert isinstance(oracle, ShortHopOracle)
    assert oracle.bound == 2 * hop_bound(6, 0.5)
    doubled = build_short_hop(graph, 0.5, 0.5, 0.5, None, None, rng, True, reach=2)
    assert doubled.bound == 2 * oracle.bound
    assert isinstance(build_short_hop(graph, 0.5, 0.5, 0.5, None, None, rng, True, integral=False), ScaledOracleBank)
    real = DynGraph(3, edges=[(0, 1, 1.5)])
    assert isinstance(build_short_hop(real, 0.5, 0.5, 0.5, None, None, rng, False), ScaledOracleBank)


def test_apsp_oracle_under_updates():
    eps = 0.5
    graph = strongly_connected_graph(16, 0.1, rng=make_rng(1))
    graph.W = 4
    oracle = APSPOracle(graph, eps=eps, rng=make_rng(2))
    everything = list(range(16))
    for command in random_stream(graph, 12, rng=make_rng(3), query_size=4):
        if command.kind == CommandKind.update:
            oracle.update(command.u, command.v, command.w)
            graph.set_weight(command.u, command.v, command.w)
            continue
        truth, _ = dijkstra_apsp(graph)
        rows, cols = list(command.rows), list(command.cols)
        _assert_sandwich(oracle.query(rows, cols), truth[np.ix_(rows, cols)], eps)
    truth, _ = dijkstra_apsp(graph)
    _assert_sandwich(oracle.query(everything, everything), truth, eps)
    assert oracle.graph.m == graph.m


def test_apsp_explicit_update():
    eps = 0.5
    graph = strongly_connected_graph(10, 0.2, rng=make_rng(4))
    oracle = APSPOracle(graph, eps=eps, rng=make_rng(5))
    u, v, _ = next(graph.arcs())
    full = oracle.explicit_update(u, v, INF)
    graph.set_weight(u, v, INF)
    truth, _ = dijkstra_apsp(graph)
    assert full.shape == (10, 10)
    _assert_sandwich(full, truth, eps)
    assert oracle.distance(3, 3) == 0


def test_apsp_oracle_real_weights():
    eps = 0.5
    graph = DynGraph(5, edges=[(0, 1, 1.5), (1, 2, 2.25), (2, 3, 1.0), (3, 4, 3.5), (4, 0, 1.25)])
    oracle = APSPOracle(graph, eps=eps, rng=make_rng(6))
    assert isinstance(oracle.short, ScaledOracleBank)
    truth, _ = dijkstra_apsp(graph)
    everything = list(range(5))
    _assert_sandwich(oracle.query(everything, everything), truth, eps)
    oracle.update(1, 3, 2.5)
    graph.set_weight(1, 3, 2.5)
    truth, _ = dijkstra_apsp(graph)
    _assert_sandwich(oracle.query(everything, everything), truth, eps)


def test_long_cycle_needs_hubs():
    eps = 0.5
    graph = cycle_graph(40)
    oracle = APSPOracle(graph, eps=eps, s=0.75, rng=make_rng(7), hitting_constant=2.0)
    assert oracle.short.bound == 16
    assert len(oracle.hubs) < 40
    truth, _ = dijkstra_apsp(graph)
    estimate = oracle.query(list(range(40)), list(range(40)))
    _assert_sandwich(estimate, truth, eps)
    assert estimate[0, 39] >= 39
    oracle.update(39, 0, INF)
    graph.set_weight(39, 0, INF)
    truth, _ = dijkstra_apsp(graph)
    _assert_sandwich(oracle.query([0, 20, 39], [0, 20, 39]), truth[np.ix_([0, 20, 39], [0, 20, 39])], eps)


def test_sssp_oracle_against_adaptive_adversary():
    eps = 0.5
    graph = strongly_connected_graph(16, 0.15, rng=make_rng(8))
    graph.W = 4
    oracle = SSSPOracle(graph, source=0, eps=eps, rng=make_rng(9))
    adversary = AdaptiveAdversary(graph, source=0, rng=make_rng(10), keep=4)
    row = oracle.distances()
    for _ in range(200):
        truth, _ = dijkstra_apsp(adversary.graph)
        _assert_sandwich(row, truth[0], eps)
        updates = adversary.next_updates(row)
        assert updates
        for update in updates:
            row = oracle.update(update.u, update.v, update.w)
    truth, _ = dijkstra_apsp(adversary.graph)
    _assert_sandwich(oracle.distances(), truth[0], eps)
    _assert_sandwich(oracle.distances(source=5), truth[5], eps)


def test_sssp_source_checks():
    with raises(IndexOutOfRange):
        SSSPOracle(cycle_graph(3), source=3)
    oracle = SSSPOracle(cycle_graph(4), source=2, rng=make_rng(11))
    assert oracle.distances().tolist() == [2.0, 3.0, 0.0, 1.0]
    with raises(IndexOutOfRange):
        oracle.distances(source=-1)


def test_undirected_oracle():
    eps = 0.5
    graph = random_connected_graph(14, 0.1, rng=make_rng(12))
    graph.W = 4
    oracle = UndirectedOracle(graph, eps=eps, rng=make_rng(13))
    assert oracle.weight_cap == 4
    everything = list(range(14))
    truth, _ = dijkstra_apsp(graph)
    _assert_sandwich(oracle.query(everything, everything), truth, eps)
    for command in random_stream(graph, 10, rng=make_rng(14), update_share=1.0):
        oracle.update(command.u, command.v, command.w)
        graph.set_weight(command.u, command.v, command.w)
        truth, _ = dijkstra_apsp(graph)
        _assert_sandwich(oracle.query(everything, everything), truth, eps)
    hub_only = oracle.hub_estimates(everything, everything)
    assert np.all(hub_only[np.isfinite(hub_only)] >= truth[np.isfinite(hub_only)] * (1 - TOLERANCE))


def test_undirected_oracle_long_path():
    eps = 0.5
    graph = cycle_graph(30, directed=False)
    oracle = UndirectedOracle(graph, eps=eps, s=0.5, rng=make_rng(15))
    truth, _ = dijkstra_apsp(graph)
    _assert_sandwich(oracle.query(list(range(30)), list(range(30))), truth, eps)
    assert oracle.distance(0, 15) >= 15


def test_undirected_oracle_rejects_bad_input():
    with raises(DirectedInput):
        UndirectedOracle(cycle_graph(4))
    with raises(ValueError, match="integer"):
        UndirectedOracle(DynGraph(3, directed=False, edges=[(0, 1, 1.5)]))
    oracle = UndirectedOracle(cycle_graph(4, directed=False, weight=2), rng=make_rng(16))
    with raises(ValueError, match="cap"):
        oracle.update(0, 2, 3)


def test_undirected_hub_assignment_tolerates_rounding():
    eps = 3.0
    n = 40
    graph = path_graph(n)
    oracle = UndirectedOracle(graph, eps=eps, s=log(32) / log(n) - 1e-12, rng=make_rng(17))
    assert oracle.hops == 32
    oracle._refresh(np.arange(4, n, 4))
    assert len(oracle.hubs) < n
    assert oracle.radius == 4
    # node 0 is exactly one radius from its nearest hub and is estimated above it
    assert oracle.short.distance(0, 4) > oracle.radius
    assert np.all(oracle.assign >= 0)
    assert oracle.assign[0] == 0
    truth, _ = dijkstra_apsp(graph)
    everything = list(range(n))
    estimate = oracle.query(everything, everything)
    _assert_sandwich(estimate, truth, eps)
    assert np.isinf(oracle.short.distance(0, n - 1))
    assert n - 1 <= estimate[0, n - 1] < INF


def test_undirected_oracle_with_sampled_hubs():
    eps = 3.0
    n = 40
    graph = path_graph(n)
    oracle = UndirectedOracle(graph, eps=eps, s=log(32) / log(n) - 1e-12, rng=make_rng(18), hitting_constant=0.5)
    assert len(oracle.hubs) < n
    truth, _ = dijkstra_apsp(graph)
    everything = list(range(n))
    estimate = oracle.query(everything, everything)
    assert np.all(estimate >= truth * (1 - TOLERANCE))
    hub_only = oracle.hub_estimates(everything, everything)
    assert np.all(hub_only >= truth * (1 - TOLERANCE))

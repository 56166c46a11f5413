from math import isinf

from ordered_set import OrderedSet
from pytest import raises

from dyndist import (
    AdaptiveAdversary,
    CommandKind,
    DistributionWeight,
    StaticWeight,
    WeightSampler,
    generate_graph,
    is_strongly_connected,
    make_rng,
    parse_graph,
    parse_stream,
)
from dyndist.generator import (
    complete_graph,
    cycle_graph,
    gnp_graph,
    path_graph,
    random_connected_graph,
    random_stream,
    star_graph,
    strongly_connected_graph,
    write_graph,
    write_stream,
)
from dyndist.types import INF


def test_weight_samplers():
    assert StaticWeight(3).next() == 3.0
    assert StaticWeight(2.5).next() == 2.5
    assert WeightSampler().next() == 1.0
    sampler = DistributionWeight("uniform", {"low": 0.0, "high": 10.0}, make_rng(1), high=6.0)
    draws = [sampler.next() for _ in range(200)]
    assert min(draws) >= 1.0
    assert max(draws) <= 6.0
    assert all(w.is_integer() for w in draws)
    assert isinstance(WeightSampler._from_yaml(4), StaticWeight)
    assert WeightSampler._from_yaml({"value": 2}).next() == 2.0
    real = WeightSampler._from_yaml(
        {"distribution": "uniform", "parameters": {"low": 1, "high": 2}, "integral": False}, make_rng(2)
    )
    assert not real.next().is_integer()
    with raises(ValueError):
        WeightSampler._from_yaml({"mean": 3})


def test_graph_families():
    assert cycle_graph(5).m == 5
    assert cycle_graph(5, directed=False).m == 5
    assert cycle_graph(2, directed=False).m == 1
    assert path_graph(4).m == 3
    assert star_graph(6).m == 5
    assert complete_graph(5).m == 10
    assert complete_graph(5, directed=True).m == 20
    assert cycle_graph(4, weight=3).weight(3, 0) == 3
    graph = gnp_graph(30, 0.2, rng=make_rng(3))
    assert graph.directed
    assert 0 < graph.m < 30 * 29
    assert all(1 <= w <= 5 and w.is_integer() for _, _, w in graph.arcs())


def test_connected_families():
    for seed in range(5):
        undirected = random_connected_graph(20, rng=make_rng(seed))
        assert not undirected.directed
        assert undirected.m >= 19
        assert is_strongly_connected(undirected)
        directed = strongly_connected_graph(20, 0.02, rng=make_rng(seed))
        assert directed.m >= 20
        assert is_strongly_connected(directed)
    assert strongly_connected_graph(1).m == 0


def test_generate_graph():
    graph = generate_graph({"family": "gnp", "n": 12, "p": 0.5, "weights": 2}, make_rng(4))
    assert graph.n == 12
    assert {w for _, _, w in graph.arcs()} == {2.0}
    assert generate_graph({"family": "cycle", "n": 7}).m == 7
    spread = generate_graph(
        {
            "family": "connected",
            "n": 10,
            "weights": {"distribution": "integers", "parameters": {"low": 1, "high": 9}, "high": 4},
        },
        make_rng(5),
    )
    assert spread.max_weight() <= 4
    with raises(ValueError, match="Unknown graph family"):
        generate_graph({"family": "lattice", "n": 4})


def test_random_stream():
    graph = gnp_graph(10, 0.3, rng=make_rng(6))
    before = dict(graph.weights)
    commands = random_stream(graph, 200, rng=make_rng(7), query_size=4)
    assert graph.weights == before
    assert [c.line for c in commands] == list(range(1, 201))
    updates = [c for c in commands if c.kind == CommandKind.update]
    queries = [c for c in commands if c.kind == CommandKind.query]
    assert len(updates) + len(queries) == 200
    assert 60 < len(updates) < 140
    assert any(isinf(c.w) for c in updates)
    assert all(c.u != c.v for c in updates)
    assert all(len(q.rows) == 4 and len(q.cols) == 4 for q in queries)
    sources = random_stream(graph, 20, CommandKind.source, rng=make_rng(8), update_share=0)
    assert all(c.kind == CommandKind.source and 0 <= c.source < 10 for c in sources)
    metrics = random_stream(graph, 5, CommandKind.radius, rng=make_rng(9), update_share=0)
    assert all(c.kind == CommandKind.radius for c in metrics)
    assert all(c.kind == CommandKind.query for c in random_stream(path_graph(1), 5, rng=make_rng(10)))


def test_adaptive_adversary():
    graph = cycle_graph(6, weight=2)
    adversary = AdaptiveAdversary(graph, source=0, rng=make_rng(11), keep=1)
    row = [0, 2, 4, 6, 8, 10]
    assert adversary.tree_arcs(row) == [(0, 1, 2.0), (1, 2, 2.0), (2, 3, 2.0), (3, 4, 2.0), (4, 5, 2.0)]
    first = adversary.next_updates(row)
    assert len(first) == 1
    assert first[0].w == INF
    assert graph.m == 6
    assert adversary.graph.m == 5
    second = adversary.next_updates(row)
    assert [c.w for c in second] == [INF, 2.0]
    assert adversary.graph.m == 5
    assert (second[1].u, second[1].v) == (first[0].u, first[0].v)


def test_written_files_parse_back(tmp_path):
    graph = random_connected_graph(8, 0.2, rng=make_rng(12))
    names = [f"v{i}" for i in range(8)]
    commands = random_stream(graph, 30, rng=make_rng(13))
    write_graph(graph, str(tmp_path / "g.txt"), names)
    write_stream(commands, str(tmp_path / "s.txt"), names)
    symbols = OrderedSet()
    parsed = parse_graph(str(tmp_path / "g.txt"), symbols)
    order = [names.index(name) for name in symbols]
    assert parsed.m == graph.m
    for u, v, w in parsed.arcs():
        assert graph.weight(order[u], order[v]) == w
    stream = parse_stream(str(tmp_path / "s.txt"), symbols, parsed.n)
    assert [c.kind for c in stream] == [c.kind for c in commands]
    for parsed_command, command in zip(stream, commands):
        if command.kind == CommandKind.update:
            assert (order[parsed_command.u], order[parsed_command.v]) == (command.u, command.v)
            assert parsed_command.w == command.w
        else:
            assert tuple(order[u] for u in parsed_command.rows) == command.rows
            assert tuple(order[v] for v in parsed_command.cols) == command.cols

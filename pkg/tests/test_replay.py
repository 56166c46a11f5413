from os import path

import numpy as np
import pandas as pd
from pytest import approx, raises

from dyndist import (
    CommandKind,
    ConfigError,
    DynGraph,
    EngineConfig,
    LogLevel,
    ParseError,
    Runner,
    logging,
    make_rng,
)
from dyndist.generator import (
    complete_graph,
    random_connected_graph,
    random_stream,
    strongly_connected_graph,
    write_graph,
    write_stream,
)
from dyndist.output import COLUMNS
from dyndist.replay import check_bounds, digest, format_answer
from dyndist.types import INF

logging.level = LogLevel.debug

SCENARIOS = path.join(path.dirname(path.abspath(__file__)), "..", "scenarios")

COMMANDS = {
    "apsp-explicit": CommandKind.query,
    "sssp": CommandKind.source,
    "undirected": CommandKind.query,
    "diameter15": CommandKind.diameter,
    "diameter-eps": CommandKind.diameter,
    "radius": CommandKind.radius,
    "ecc": CommandKind.eccentricities,
    "closeness": CommandKind.closeness,
    "exact-diam": CommandKind.exact_diameter,
}


def _files(tmp_path, graph: DynGraph, kind: CommandKind = CommandKind.query, count: int = 12, seed: int = 0):
    commands = random_stream(graph, count, kind, rng=make_rng(seed), update_share=0.4, delete_share=0.0)
    write_graph(graph, str(tmp_path / "g.txt"))
    write_stream(commands, str(tmp_path / "s.txt"))
    return str(tmp_path / "g.txt"), str(tmp_path / "s.txt")


def _read(file) -> pd.DataFrame:
    return pd.read_csv(file, dtype={"answer": str, "digest": str, "command": str})


def test_digest_and_format():
    assert digest([1.0, 2.0]) == digest(np.array([[1.0, 2.0]]))
    assert digest([1.0, 2.0]) != digest([2.0, 1.0])
    assert len(digest(0.0)) == 16
    assert format_answer(np.array([3.0])) == "3"
    assert format_answer(np.array([1.0, INF])) == "1 inf"
    assert format_answer(np.array([[0.0, 1.5], [2.0, 0.0]])) == "0 1.5;2 0"


def test_check_bounds():
    truth = np.array([1.0, 2.0, INF, 0.0])
    ratio_min, ratio_max, violation = check_bounds([1.0, 3.0, INF, 0.0], truth, truth, 1.5 * truth)
    assert (ratio_min, ratio_max, violation) == (1.0, 1.5, False)
    assert check_bounds([1.0, 3.1, INF, 0.0], truth, truth, 1.5 * truth)[2]
    assert check_bounds([1.0, 2.0, 7.0, 0.0], truth, truth, 1.5 * truth)[2]
    assert check_bounds([0.99, 2.0, INF, 0.0], truth, truth, truth)[2]
    assert not check_bounds([1.0 + 1e-12], [1.0], [1.0], [1.0])[2]
    ratio_min, ratio_max, violation = check_bounds([0.0, 2.0], [0.0, 1.0], 0.0, 2.0)
    assert (ratio_min, ratio_max, violation) == (1.0, 2.0, False)
    assert check_bounds([], [], [], []) == (1.0, 1.0, False)


def test_empty_stream_writes_header(tmp_path):
    out = tmp_path / "out.csv"
    config = EngineConfig(
        graph=path.join(SCENARIOS, "tiny.graph"), stream=path.join(SCENARIOS, "empty.stream"), csv_out=str(out)
    )
    assert Runner(config).run() == 0
    assert out.read_text().splitlines() == [",".join(COLUMNS)]


def test_tiny_scenario(tmp_path):
    out = tmp_path / "tiny.csv"
    config, scenario = EngineConfig.from_argv([f"--config={path.join(SCENARIOS, 'tiny.yaml')}", f"--csv-out={out}"])
    runner = Runner(config, scenario)
    assert runner.single_run
    assert runner.run() == 0
    frame = _read(out)
    assert list(frame["answer"]) == ["0"]
    assert list(frame["command"]) == ["Q a;a"]


def test_corpus_is_within_bounds(tmp_path):
    out = tmp_path / "corpus.csv"
    config, scenario = EngineConfig.from_yaml(path.join(SCENARIOS, "corpus64.yaml"))
    config.csv_out = str(out)
    runner = Runner(config, scenario)
    assert runner.run() == 0
    frame = _read(out)
    assert len(frame) == 41
    assert not frame["violation"].any()
    assert (frame["ratio_min"] >= 1 - 1e-9).all()
    assert (frame["ratio_max"] <= 1.5 * (1 + 1e-9)).all()


def test_replay_is_deterministic(tmp_path):
    graph = strongly_connected_graph(12, 0.1, rng=make_rng(1))
    graph_file, stream_file = _files(tmp_path, graph, seed=2)
    digests = []
    for run in range(2):
        out = tmp_path / f"run{run}.csv"
        Runner(EngineConfig(graph=graph_file, stream=stream_file, seed=5, csv_out=str(out))).run()
        digests.append(list(_read(out)["digest"]))
    assert digests[0] == digests[1]
    assert len(digests[0]) > 0


def test_modes_stay_within_bounds(tmp_path):
    for seed, (mode, kind) in enumerate(COMMANDS.items()):
        graph = random_connected_graph(10, 0.15, rng=make_rng(10 + seed))
        graph_file, stream_file = _files(tmp_path, graph, kind, seed=20 + seed)
        out = tmp_path / f"{mode}.csv"
        config = EngineConfig(
            graph=graph_file, stream=stream_file, mode=mode, oracle_check=True, seed=seed, csv_out=str(out)
        )
        runner = Runner(config)
        assert runner.run() == 0, mode
        frame = _read(out)
        assert len(frame) > 0, mode
        assert not frame["violation"].any(), mode
        if mode == "exact-diam":
            assert (frame["ratio_min"] == 1).all()


def test_sweep_batches(tmp_path):
    graph = strongly_connected_graph(8, 0.2, rng=make_rng(3))
    graph_file, stream_file = _files(tmp_path, graph, seed=4)
    out = tmp_path / "sweep.csv"
    config = EngineConfig(graph=graph_file, stream=stream_file, oracle_check=True, csv_out=str(out))
    scenario = {
        "runs_per_batch": 2,
        "batches": [
            {"grid": [{"epsilon": [0.5, 1.0], "seed": {"range": [0, 1], "step": 1}}]},
            {"single": [{"epsilon": 0.25}]},
        ],
    }
    runner = Runner(config, scenario)
    assert len(runner.replays) == 10
    assert runner.title.startswith("10x")
    assert [r.config.seed for r in runner.replays[:4]] == [0, 1, 1, 2]
    assert runner.replays[-1].config.epsilon == 0.25
    assert runner.run() == 0
    frame = _read(out)
    assert list(frame.columns[:4]) == ["epsilon", "seed", "run_id", "command_id"]
    assert sorted(frame["run_id"].unique()) == list(range(10))
    assert (frame[frame["run_id"] == 8]["epsilon"] == 0.25).all()


def test_replay_rejects_unsuitable_input(tmp_path):
    directed = strongly_connected_graph(6, rng=make_rng(5))
    graph_file, stream_file = _files(tmp_path, directed, CommandKind.radius)
    with raises(ConfigError, match="undirected"):
        Runner(EngineConfig(graph=graph_file, stream=stream_file, mode="radius"))
    with raises(ParseError, match="not available"):
        Runner(EngineConfig(graph=graph_file, stream=stream_file, mode="apsp"))

    real = DynGraph(3, directed=False, edges=[(0, 1, 1.5), (1, 2, 1)])
    write_graph(real, str(tmp_path / "real.txt"))
    (tmp_path / "d.txt").write_text("D\n")
    with raises(ConfigError, match="integer"):
        Runner(EngineConfig(graph=str(tmp_path / "real.txt"), stream=str(tmp_path / "d.txt"), mode="diameter15"))
    with raises(ConfigError, match="Unknown batch type"):
        Runner(EngineConfig(graph=graph_file, stream=stream_file), {"batches": [{"random": []}]})


def test_real_weights_in_apsp_mode(tmp_path):
    graph = DynGraph(4, edges=[(0, 1, 1.5), (1, 2, 2.5), (2, 3, 1.25), (3, 0, 3.0)])
    write_graph(graph, str(tmp_path / "g.txt"))
    (tmp_path / "s.txt").write_text("Q 0;2,3\nU 0 2 1.75\nQ 0;2,3\n")
    out = tmp_path / "out.csv"
    config = EngineConfig(graph=str(tmp_path / "g.txt"), stream=str(tmp_path / "s.txt"), oracle_check=True,
                          csv_out=str(out))
    assert Runner(config).run() == 0
    frame = _read(out)
    assert len(frame) == 2
    first = [float(x) for x in frame["answer"][0].split()]
    assert first[0] == approx(4.0, rel=0.5)


def test_complexity_mode(tmp_path):
    out = tmp_path / "exponents.csv"
    runner = Runner(EngineConfig(mode="complexity", csv_out=str(out)))
    assert runner.replays == []
    assert runner.run() == 0
    frame = pd.read_csv(out)
    assert "apsp" in set(frame["expression"])
    assert frame[frame["expression"] == "dual"]["update"].iloc[0] == approx(1.5286, abs=0.005)


def test_diameter_eps_mode_on_dense_graph(tmp_path):
    graph = complete_graph(16, directed=True)
    graph.set_weight(0, 1, 4)
    write_graph(graph, str(tmp_path / "g.txt"))
    (tmp_path / "s.txt").write_text("D\nU 2 3 3\nD\n")
    out = tmp_path / "out.csv"
    config = EngineConfig(graph=str(tmp_path / "g.txt"), stream=str(tmp_path / "s.txt"), mode="diameter-eps",
                          s=0.5, mu=0.5, oracle_check=True, csv_out=str(out))
    assert Runner(config).run() == 0
    frame = _read(out)
    assert list(frame["answer"]) == ["2", "2"]
    assert not frame["violation"].any()

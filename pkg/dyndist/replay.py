"""Replaying an update stream against one oracle.

A :class:`Replay` loads the graph and the stream named by its configuration, builds the oracle for the configured
mode, answers every command and, with ``oracle_check``, compares every answer against exact distances.
"""

from hashlib import sha256
from math import isinf
from time import perf_counter
from typing import Any, Dict, Final, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
from ordered_set import OrderedSet
from pandas import DataFrame

from . import polymatrix
from .config import EngineConfig
from .errors import ConfigError, ParseError
from .ff_poly import FieldConfig, make_rng, ops
from .graphenc import DynGraph
from .logging import log
from .longrange import APSPOracle, SSSPOracle, UndirectedOracle, build_short_hop, hop_bound
from .metrics import (
    ExactDiameterOracle,
    MetricSnapshot,
    closeness_all,
    diameter_15,
    diameter_eps,
    eccentricities_35,
    exact_diameter,
    radius_15,
)
from .oracle import dijkstra_apsp, exact_metrics
from .output import CHECK_COLUMNS, COLUMNS
from .parser import StreamCommand, SymbolTable, parse_graph, parse_stream
from .shorthop import ScaledOracleBank, ShortHopOracle
from .types import INF, CommandKind, DistMatrix, LogLevel, Mode


CHECK_TOLERANCE: Final[float] = 1e-9
METRIC_SHARE: Final[int] = 4

ALLOWED: Final[Dict[Mode, Tuple[CommandKind, ...]]] = {
    Mode.apsp: (CommandKind.update, CommandKind.query),
    Mode.apsp_explicit: (CommandKind.update, CommandKind.query),
    Mode.undirected: (CommandKind.update, CommandKind.query),
    Mode.sssp: (CommandKind.update, CommandKind.source),
    Mode.diameter15: (CommandKind.update, CommandKind.diameter),
    Mode.diameter_eps: (CommandKind.update, CommandKind.diameter),
    Mode.radius: (CommandKind.update, CommandKind.radius),
    Mode.ecc: (CommandKind.update, CommandKind.eccentricities),
    Mode.closeness: (CommandKind.update, CommandKind.closeness),
    Mode.exact_diam: (CommandKind.update, CommandKind.exact_diameter),
}

INTEGER_MODES: Final = (
    Mode.undirected,
    Mode.diameter15,
    Mode.diameter_eps,
    Mode.radius,
    Mode.ecc,
    Mode.closeness,
    Mode.exact_diam,
)
UNDIRECTED_MODES: Final = (Mode.undirected, Mode.radius, Mode.ecc, Mode.closeness)

Engine = (
    APSPOracle | SSSPOracle | UndirectedOracle | ShortHopOracle | ScaledOracleBank | ExactDiameterOracle
)


def digest(answer: npt.ArrayLike) -> str:
    """First 16 hex digits of the SHA-256 of the answer's float64 bytes."""
    values = np.ascontiguousarray(answer, dtype=np.float64)
    return sha256(values.tobytes()).hexdigest()[:16]


def format_answer(answer: npt.ArrayLike) -> str:
    """Scalars as numbers, vectors space-separated, matrices with rows separated by ``;``."""
    values = np.asarray(answer, dtype=np.float64)
    if values.size == 1:
        return f"{values.item():g}"
    if values.ndim == 1:
        return " ".join(f"{x:g}" for x in values)
    return ";".join(" ".join(f"{x:g}" for x in row) for row in values)


def check_bounds(
    answer: npt.ArrayLike, truth: npt.ArrayLike, lower: npt.ArrayLike, upper: npt.ArrayLike
) -> Tuple[float, float, bool]:
    """Compare answers with their allowed range.

    Infinite truths must be answered with infinity; finite ones must lie in ``[lower, upper]`` up to a relative
    tolerance of :data:`CHECK_TOLERANCE`.

    Returns:
        (float, float, bool): Smallest and largest ``answer / truth``, and whether any answer is out of range.
    """
    answer = np.asarray(answer, dtype=np.float64).ravel()
    truth = np.asarray(truth, dtype=np.float64).ravel()
    lower = np.broadcast_to(np.asarray(lower, dtype=np.float64).ravel(), truth.shape)
    upper = np.broadcast_to(np.asarray(upper, dtype=np.float64).ravel(), truth.shape)

    finite = np.isfinite(truth)
    slack = CHECK_TOLERANCE * np.maximum(1.0, np.where(finite, np.abs(truth), 0.0))
    inside = finite & (answer >= lower - slack) & (answer <= upper + slack)
    missing = ~finite & np.isinf(answer)
    violation = not bool(np.all(inside | missing))

    ratio = np.ones(truth.shape)
    positive = finite & (truth > 0)
    with np.errstate(invalid="ignore"):
        ratio[positive] = answer[positive] / truth[positive]
    other = ~positive & (answer != truth)
    ratio[other] = np.where(answer[other] > truth[other], INF, 0.0)
    if ratio.size == 0:
        return 1.0, 1.0, violation
    return float(ratio.min()), float(ratio.max()), violation


class Replay:
    """One configuration replayed over one graph and stream."""

    index: Final[int]
    runner: Final
    config: Final[EngineConfig]
    variation: Final[Optional[str]]
    variation_dict: Final[Dict[str, Any]]
    symbols: Final[SymbolTable]
    graph: DynGraph
    commands: List[StreamCommand]
    integral: bool
    rng: np.random.Generator
    engine: Optional[Engine]
    command_id: int
    rows: List[Dict[str, Any]]
    violations: int

    def __init__(
        self,
        runner,
        config: EngineConfig,
        variation: Optional[str] = None,
        variation_dict: Optional[Dict[str, Any]] = None,
    ):
        """Load the graph and stream and check that the mode can run on them.

        Args:
            runner (Runner): The runner the replay belongs to.
            config (EngineConfig): Settings of this replay.
            variation (str, optional): Readable form of the batch variation. Defaults to None.
            variation_dict (Dict[str, Any], optional): Batch variation. Defaults to None.

        Raises:
            ParseError: If a file is malformed or holds a command the mode cannot answer.
            ConfigError: If the graph does not suit the mode.
        """
        self.runner = runner
        self.index = len(runner.replays)
        self.config = config
        self.variation = f"{self.index} - {variation}" if variation else None
        self.variation_dict = variation_dict or {}
        self.command_id = 0
        self.rows = []
        self.violations = 0
        self.engine = None

        config.check_files()
        self.symbols = OrderedSet()
        self.graph = parse_graph(str(config.graph), self.symbols)
        self.commands = parse_stream(str(config.stream), self.symbols, self.graph.n)

        allowed = ALLOWED[config.mode]
        for command in self.commands:
            if command.kind not in allowed:
                raise ParseError(f"Command '{command.kind.value}' is not available in mode {config.mode.value}",
                                 command.line, 1)

        weights = [w for _, _, w in self.graph.arcs()]
        weights += [c.w for c in self.commands if c.kind == CommandKind.update and not isinf(c.w)]
        self.integral = all(float(w).is_integer() for w in weights)
        self.graph.W = max(weights, default=1.0)
        if config.mode in INTEGER_MODES and not self.integral:
            raise ConfigError(f"Mode {config.mode.value} needs integer weights")
        if config.mode in UNDIRECTED_MODES and self.graph.directed:
            raise ConfigError(f"Mode {config.mode.value} needs an undirected graph")

        log(
            f"Loaded {self.graph} and {len(self.commands)} commands for mode {config.mode.value}",
            LogLevel.debug,
            run=self,
        )

    def _build_engine(self) -> Engine:
        c = self.config
        s, mu, nu = c.parameters()
        field = FieldConfig(c.prime)
        graph = self.graph
        metric_eps = c.epsilon / METRIC_SHARE
        match c.mode:
            case Mode.apsp | Mode.apsp_explicit:
                return APSPOracle(graph, c.epsilon, s, mu, nu, field, self.rng, c.hitting_constant, c.wrapped,
                                  integral=self.integral)
            case Mode.sssp:
                return SSSPOracle(graph, 0, c.epsilon, s, mu, nu, field, self.rng, c.hitting_constant, c.wrapped,
                                  integral=self.integral)
            case Mode.undirected:
                return UndirectedOracle(graph, c.epsilon, s, mu, nu, field, self.rng, c.hitting_constant, c.wrapped)
            case Mode.ecc | Mode.closeness:
                return UndirectedOracle(graph, metric_eps, s, mu, nu, field, self.rng, c.hitting_constant, c.wrapped)
            case Mode.diameter15 | Mode.diameter_eps:
                return build_short_hop(graph, metric_eps, s, mu, nu, field, self.rng, c.wrapped, integral=True)
            case Mode.radius:
                return build_short_hop(graph, metric_eps, s, mu, nu, field, self.rng, c.wrapped, reach=2,
                                       integral=True)
            case Mode.exact_diam:
                return ExactDiameterOracle(graph, s, mu, nu, field, self.rng, c.hitting_constant, c.wrapped)
            case _:
                raise ConfigError(f"Mode {c.mode.value} does not replay a stream")

    def _snapshot(self) -> MetricSnapshot:
        engine = self.engine
        s, _, _ = self.config.parameters()
        hops = hop_bound(self.graph.n, s)
        if isinstance(engine, UndirectedOracle):
            return MetricSnapshot(engine.query, self.graph, INF, hops, engine.weight_cap)
        if isinstance(engine, ShortHopOracle):
            return MetricSnapshot(engine.batch_query, self.graph, engine.bound, hops, self.graph.W)
        raise ConfigError(f"Mode {self.config.mode.value} has no metric oracle")

    def _answer(self, command: StreamCommand) -> Optional[Tuple[npt.NDArray[np.float64], Optional[Tuple]]]:
        """Run one command; returns the answer, and the truth with its allowed range when checking."""
        engine = self.engine
        c = self.config
        check = c.oracle_check
        eps = c.epsilon
        answer: DistMatrix

        match command.kind:
            case CommandKind.update:
                self.graph.set_weight(command.u, command.v, command.w)
                if isinstance(engine, APSPOracle) and c.mode == Mode.apsp_explicit:
                    answer = engine.explicit_update(command.u, command.v, command.w)
                elif isinstance(engine, SSSPOracle):
                    answer = engine.update(command.u, command.v, command.w)
                elif engine is not None:
                    engine.update(command.u, command.v, command.w)
                    return None
                else:
                    raise ConfigError("No oracle built")
                if not check:
                    return answer, None
                dist, _ = dijkstra_apsp(self.graph)
                truth = dist[engine.source] if isinstance(engine, SSSPOracle) else dist
                return answer, (truth, truth, (1 + eps) * truth)

            case CommandKind.query if isinstance(engine, (APSPOracle, UndirectedOracle)):
                rows = np.unique(np.asarray(command.rows, dtype=np.int64))
                cols = np.unique(np.asarray(command.cols, dtype=np.int64))
                answer = engine.query(rows, cols)
                if not check:
                    return answer, None
                dist, _ = dijkstra_apsp(self.graph)
                truth = dist[np.ix_(rows, cols)]
                return answer, (truth, truth, (1 + eps) * truth)

            case CommandKind.source if isinstance(engine, SSSPOracle):
                engine.source = command.source
                answer = engine.distances()
                if not check:
                    return answer, None
                dist, _ = dijkstra_apsp(self.graph)
                truth = dist[command.source]
                return answer, (truth, truth, (1 + eps) * truth)

            case CommandKind.exact_diameter if isinstance(engine, ExactDiameterOracle):
                answer = np.array([exact_diameter(engine)])
                if not check:
                    return answer, None
                truth = np.array([exact_metrics(self.graph).diameter])
                return answer, (truth, truth, truth)

        snapshot = self._snapshot()
        truth_metrics = exact_metrics(self.graph) if check else None
        match command.kind:
            case CommandKind.diameter if c.mode == Mode.diameter15:
                answer = np.array([float(diameter_15(snapshot, eps, self.rng))])
                if truth_metrics is None:
                    return answer, None
                d = truth_metrics.diameter
                return answer, (np.array([d]), (2 / 3 - eps) * d - 1 / 3, (1 + eps) * d)
            case CommandKind.diameter:
                answer = np.array([float(diameter_eps(snapshot, eps, self.rng, constant=c.hitting_constant))])
                if truth_metrics is None:
                    return answer, None
                d = truth_metrics.diameter
                return answer, (np.array([d]), d / (1 + eps), (1 + eps) * d)
            case CommandKind.radius:
                answer = np.array([float(radius_15(snapshot, eps, self.rng))])
                if truth_metrics is None:
                    return answer, None
                r = truth_metrics.radius
                return answer, (np.array([r]), r / (1 + eps), ((1.5 + eps) * r + 2 / 3) * (1 + eps))
            case CommandKind.eccentricities:
                answer = eccentricities_35(snapshot, eps, self.rng)
                if truth_metrics is None:
                    return answer, None
                ecc = truth_metrics.eccentricities
                return answer, (ecc, (3 - 6 * eps) / 5 * ecc - 4 / 7, (1 + 2 * eps) * ecc)
            case _:
                answer = closeness_all(snapshot, eps, self.rng, c.closeness_constant)
                if truth_metrics is None:
                    return answer, None
                closeness = truth_metrics.closeness
                return answer, (closeness, (1 - eps) * closeness, (1 + eps) * closeness)

    def run(self) -> DataFrame:
        """Build the oracle and answer every command.

        Returns:
            DataFrame: One row per answered command; only the header when nothing was answered.
        """
        c = self.config
        polymatrix.STRASSEN_THRESHOLD = c.strassen_threshold
        self.rng = make_rng(c.seed)
        start = perf_counter()
        self.engine = self._build_engine()
        log(f"Built {type(self.engine).__name__} in {perf_counter() - start:.3f}s", LogLevel.debug, run=self)

        for command in self.commands:
            self.command_id += 1
            before = ops.count
            start = perf_counter()
            result = self._answer(command)
            wall_time = perf_counter() - start
            if result is None:
                continue
            answer, bounds = result
            row: Dict[str, Any] = {
                "command_id": self.command_id,
                "command": str(command),
                "wall_time": wall_time,
                "op_count": ops.count - before,
                "digest": digest(answer),
                "answer": format_answer(answer),
            }
            if bounds is not None:
                truth, lower, upper = bounds
                ratio_min, ratio_max, violation = check_bounds(answer, truth, lower, upper)
                row.update(ratio_min=ratio_min, ratio_max=ratio_max, violation=violation)
                if violation:
                    self.violations += 1
                    log(
                        f"Bound violated by '{command}': ratios [{ratio_min:.6f}, {ratio_max:.6f}]",
                        LogLevel.error,
                        fg_color="red",
                        run=self,
                    )
            log(f"{command} -> {row['digest']}", LogLevel.verbose, run=self)
            self.rows.append(row)

        columns = list(COLUMNS) + (list(CHECK_COLUMNS) if c.oracle_check else [])
        return DataFrame(self.rows, columns=columns)

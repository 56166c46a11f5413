"""Graph metrics computed from a distance oracle.

Every computation runs against a :class:`MetricSnapshot`, which memoises the answers so that a pair asked twice
during one computation gets the same value both times.
"""

from math import ceil, log as ln, sqrt
from typing import Callable, Final, NamedTuple, Optional

import numpy as np
import numpy.typing as npt
from scipy.sparse.csgraph import dijkstra

from .errors import DirectedInput, NotConnected
from .ff_poly import FieldConfig, make_rng
from .graphenc import DEFAULT_HITTING_CONSTANT, DynGraph, is_strongly_connected, sample_hitting_set
from .logging import log
from .minplus import minplus_power
from .shorthop import ShortHopOracle
from .types import INF, DiameterCase, DistMatrix, IndexSet, LogLevel, Number


SAMPLE_CONSTANT: Final[float] = 3.0
CLOSENESS_CONSTANT: Final[float] = 4.0

QueryFunction = Callable[[npt.NDArray[np.int64], npt.NDArray[np.int64]], DistMatrix]


class DiameterEstimate:
    """A diameter or radius estimate together with the branch that produced it."""

    value: float
    case: DiameterCase

    def __init__(self, value: Number, case: DiameterCase):
        """Create an estimate; ``value`` must be nonnegative."""
        if value < 0:
            raise ValueError(f"Negative estimate {value}")
        self.value = float(value)
        self.case = case

    def __float__(self) -> float:
        """The estimated value."""
        return self.value

    def __repr__(self) -> str:
        """Get a string representation of the estimate."""
        return f"DiameterEstimate({self.value}, {self.case.value})"


class MetricSnapshot:
    """Memoising view of one oracle version."""

    query: QueryFunction
    graph: DynGraph
    n: Final[int]
    bound: Final[float]
    hop_bound: Final[int]
    weight_cap: Final[float]
    memo: DistMatrix
    queries: int

    def __init__(
        self,
        query: QueryFunction,
        graph: DynGraph,
        bound: float = INF,
        hop_bound: Optional[int] = None,
        weight_cap: Optional[float] = None,
    ):
        """Bind a snapshot to a batch query.

        Args:
            query (QueryFunction): Answers sorted row and column index sets.
            graph (DynGraph): Graph the oracle currently represents; copied.
            bound (float, optional): Largest value the oracle resolves. Defaults to unbounded.
            hop_bound (int, optional): Hop bound of the oracle. Defaults to ``ceil(sqrt(n))``.
            weight_cap (float, optional): Weight cap. Defaults to the graph's.
        """
        self.query = query
        self.graph = graph.copy()
        self.n = graph.n
        self.bound = bound
        self.hop_bound = max(1, ceil(sqrt(self.n))) if hop_bound is None else hop_bound
        self.weight_cap = graph.weight_cap() if weight_cap is None else weight_cap
        self.memo = np.full((self.n, self.n), np.nan)
        np.fill_diagonal(self.memo, 0.0)
        self.queries = 0

    def distances(self, rows: IndexSet, cols: IndexSet) -> DistMatrix:
        """Estimates for ``rows x cols`` in the given order; only unseen pairs reach the oracle."""
        r = np.asarray(rows, dtype=np.int64).reshape(-1)
        c = np.asarray(cols, dtype=np.int64).reshape(-1)
        block = self.memo[np.ix_(r, c)]
        missing = np.isnan(block)
        if missing.any():
            ask_rows = np.unique(r[missing.any(axis=1)])
            ask_cols = np.unique(c[missing.any(axis=0)])
            answer = np.asarray(self.query(ask_rows, ask_cols), dtype=np.float64)
            self.queries += 1
            known = self.memo[np.ix_(ask_rows, ask_cols)]
            self.memo[np.ix_(ask_rows, ask_cols)] = np.where(np.isnan(known), answer, known)
            block = self.memo[np.ix_(r, c)]
        return block

    def rows(self, nodes: IndexSet) -> DistMatrix:
        """Estimates from ``nodes`` to every node."""
        return self.distances(nodes, np.arange(self.n))

    def cols(self, nodes: IndexSet) -> DistMatrix:
        """Estimates from every node to ``nodes``, one row per node of ``nodes``."""
        return self.distances(np.arange(self.n), nodes).T

    def connected(self) -> bool:
        """Whether the snapshot's graph is strongly connected."""
        return is_strongly_connected(self.graph)


class SamplePhase(NamedTuple):
    """Nodes and distances gathered by the shared sampling phase of the 1.5-approximations."""

    sample: npt.NDArray[np.int64]
    farthest: int
    close: npt.NDArray[np.int64]
    values: DistMatrix


def _sample_phase(snapshot: MetricSnapshot, rng: np.random.Generator) -> SamplePhase:
    n = snapshot.n
    size = min(n, ceil(SAMPLE_CONSTANT * sqrt(n) * ln(n)))
    sample = np.sort(rng.choice(n, size=size, replace=False)).astype(np.int64)
    from_sample = snapshot.rows(sample)
    to_sample = snapshot.cols(sample)

    farthest = int(np.argmax(to_sample.min(axis=0)))
    row = snapshot.rows([farthest])[0]
    column = snapshot.cols([farthest])[0]
    order = np.lexsort((np.arange(n), row))
    close = np.sort(order[: ceil(sqrt(n))]).astype(np.int64)
    from_close = snapshot.rows(close)
    to_close = snapshot.cols(close)

    values = np.concatenate((from_sample.ravel(), to_sample.ravel(), row, column, from_close.ravel(), to_close.ravel()))
    return SamplePhase(sample, farthest, close, values)


def _exceeds(values: DistMatrix, bound: float) -> bool:
    return bool(np.any(np.isinf(values)) or np.any(values > bound))


def diameter_15(snapshot: MetricSnapshot, eps: float, rng: Optional[np.random.Generator] = None) -> DiameterEstimate:
    """Nearly 1.5-approximate diameter from about ``n^1.5`` queried pairs.

    Samples ``S``, finds the node ``w`` farthest from ``S``, and the ``sqrt(n)`` nodes closest to ``w``; the maximum of
    all distances from and to these nodes is at least about two thirds of the diameter. If some queried distance is
    beyond the oracle's bound, the diameter is large and :func:`diameter_1eps` answers instead.
    """
    rng = rng or make_rng()
    if snapshot.n == 1:
        return DiameterEstimate(0, DiameterCase.small)
    if not snapshot.connected():
        return DiameterEstimate(INF, DiameterCase.disconnected)
    phase = _sample_phase(snapshot, rng)
    if _exceeds(phase.values, snapshot.bound):
        log("Diameter beyond the short-hop bound, using hub sampling", LogLevel.warning)
        return diameter_1eps(snapshot, eps, rng)
    return DiameterEstimate(float(phase.values.max()), DiameterCase.small)


def radius_15(snapshot: MetricSnapshot, eps: float, rng: Optional[np.random.Generator] = None) -> DiameterEstimate:
    """Nearly 1.5-approximate radius of an undirected graph: minimum depth over the sampled centres.

    Raises:
        DirectedInput: If the graph is directed.
    """
    if snapshot.graph.directed:
        raise DirectedInput("Radius needs an undirected graph")
    rng = rng or make_rng()
    if snapshot.n == 1:
        return DiameterEstimate(0, DiameterCase.small)
    if not snapshot.connected():
        return DiameterEstimate(INF, DiameterCase.disconnected)
    phase = _sample_phase(snapshot, rng)
    centres = np.union1d(np.union1d(phase.sample, phase.close), [phase.farthest])
    depth = snapshot.rows(centres).max(axis=1)
    if _exceeds(depth, snapshot.bound):
        log("Radius beyond the short-hop bound, using hub sampling", LogLevel.warning)
        return radius_1eps(snapshot, eps, rng)
    return DiameterEstimate(float(depth.min()), DiameterCase.small)


def eccentricities_35(
    snapshot: MetricSnapshot, eps: float, rng: Optional[np.random.Generator] = None
) -> npt.NDArray[np.float64]:
    """Nearly 5/3-approximate eccentricities of an undirected graph.

    Sampled centres get the maximum of their row; every other node ``v`` gets ``max(d(s, v), ecc(s) - d(s, v))``
    maximised over the centres ``s``. Estimates never exceed the largest queried distance.

    Raises:
        DirectedInput: If the graph is directed.
    """
    if snapshot.graph.directed:
        raise DirectedInput("Eccentricities need an undirected graph")
    rng = rng or make_rng()
    n = snapshot.n
    if n == 1:
        return np.zeros(1)
    if not snapshot.connected():
        return np.full(n, INF)
    phase = _sample_phase(snapshot, rng)
    centres = np.union1d(np.union1d(phase.sample, phase.close), [phase.farthest]).astype(np.int64)
    rows = snapshot.rows(centres)
    centre_ecc = rows.max(axis=1)
    estimates = np.max(np.maximum(rows, centre_ecc[:, None] - rows), axis=0)
    estimates[centres] = centre_ecc
    return np.minimum(estimates, rows.max())


def _hub_closure(
    snapshot: MetricSnapshot, eps: float, rng: np.random.Generator, hubs: Optional[IndexSet], constant: float
) -> tuple[DistMatrix, float]:
    if not snapshot.connected():
        raise NotConnected("The graph is not strongly connected")
    n = snapshot.n
    step = eps / 4
    d = snapshot.hop_bound
    if hubs is None:
        size = min(n, ceil(constant * 2 * n / (d * step**2) * ln(n))) if n > 1 else 1
        nodes = np.sort(rng.choice(n, size=size, replace=False)).astype(np.int64)
    else:
        nodes = np.unique(np.asarray(hubs, dtype=np.int64))
    limit = snapshot.weight_cap * d
    between = snapshot.distances(nodes, nodes)
    between = np.where(between <= limit, between, INF)
    return minplus_power(between, step), limit * step


def diameter_1eps(
    snapshot: MetricSnapshot,
    eps: float,
    rng: Optional[np.random.Generator] = None,
    hubs: Optional[IndexSet] = None,
    constant: float = SAMPLE_CONSTANT,
) -> DiameterEstimate:
    """(1+eps)-approximate diameter through the hub graph: edges between hubs at most ``W d`` apart.

    Raises:
        NotConnected: If the graph is not strongly connected.
    """
    closure, slack = _hub_closure(snapshot, eps, rng or make_rng(), hubs, constant)
    return DiameterEstimate(float(closure.max()) + slack, DiameterCase.large)


def radius_1eps(
    snapshot: MetricSnapshot,
    eps: float,
    rng: Optional[np.random.Generator] = None,
    hubs: Optional[IndexSet] = None,
    constant: float = SAMPLE_CONSTANT,
) -> DiameterEstimate:
    """(1+eps)-approximate radius of an undirected graph through the hub graph.

    Raises:
        DirectedInput: If the graph is directed.
        NotConnected: If the graph is not connected.
    """
    if snapshot.graph.directed:
        raise DirectedInput("Radius needs an undirected graph")
    closure, slack = _hub_closure(snapshot, eps, rng or make_rng(), hubs, constant)
    return DiameterEstimate(float(closure.max(axis=1).min()) + slack / 2, DiameterCase.large)


def diameter_eps(
    snapshot: MetricSnapshot,
    eps: float,
    rng: Optional[np.random.Generator] = None,
    constant: float = SAMPLE_CONSTANT,
) -> DiameterEstimate:
    """(1+eps)-approximate diameter for any diameter.

    Every pair is queried first. When all estimates stay within the oracle's bound ``W d`` their maximum is the
    answer; otherwise the diameter exceeds ``W d``, which is where :func:`diameter_1eps` holds its guarantee.
    """
    if snapshot.n == 1:
        return DiameterEstimate(0, DiameterCase.small)
    if not snapshot.connected():
        return DiameterEstimate(INF, DiameterCase.disconnected)
    everything = np.arange(snapshot.n)
    values = snapshot.distances(everything, everything)
    if not _exceeds(values, snapshot.bound):
        return DiameterEstimate(float(values.max()), DiameterCase.small)
    log("Diameter beyond the short-hop bound, using hub sampling", LogLevel.verbose)
    return diameter_1eps(snapshot, eps, rng, constant=constant)


def closeness_all(
    snapshot: MetricSnapshot,
    eps: float,
    rng: Optional[np.random.Generator] = None,
    constant: float = CLOSENESS_CONSTANT,
) -> npt.NDArray[np.float64]:
    """Closeness centrality ``(n - 1) / sum_v dist(v, s)`` of every node, estimated from sampled rows.

    Raises:
        DirectedInput: If the graph is directed.
    """
    if snapshot.graph.directed:
        raise DirectedInput("Closeness needs an undirected graph")
    rng = rng or make_rng()
    n = snapshot.n
    if n == 1 or not snapshot.connected():
        return np.zeros(n)
    size = min(n, ceil(constant * n ** (2 / 3) / eps**2 * ln(n)))
    sample = np.sort(rng.choice(n, size=size, replace=False)).astype(np.int64)
    totals = snapshot.rows(sample).sum(axis=0)
    return size * (n - 1) / (n * totals)


class ExactDiameterOracle:
    """Dynamic exact diameter for integer weights.

    Pairs within the value bound ``W ceil(n^s)`` are resolved by the short-hop oracle tracking every degree up to the
    bound; farther pairs go through shortest-path trees from and to random hubs.
    """

    short: ShortHopOracle
    hops: Final[int]
    hitting_constant: Final[float]
    rng: np.random.Generator

    def __init__(
        self,
        graph: DynGraph,
        s: float = 0.5,
        mu: float = 0.5,
        nu: Optional[float] = None,
        field: Optional[FieldConfig] = None,
        rng: Optional[np.random.Generator] = None,
        hitting_constant: float = DEFAULT_HITTING_CONSTANT,
        wrapped: bool = True,
    ):
        """Build the short-hop oracle with every threshold ``1..W ceil(n^s)``.

        Raises:
            ValueError: If a weight is not an integer.
        """
        if not graph.is_integral():
            raise ValueError("Exact diameter needs integer weights")
        self.rng = rng or make_rng()
        self.hops = max(1, ceil(graph.n**s))
        self.hitting_constant = hitting_constant
        bound = int(ceil(graph.weight_cap())) * self.hops
        self.short = ShortHopOracle(
            graph,
            eps=1.0,
            mu=mu,
            nu=nu,
            bound=bound,
            thresholds=range(1, bound + 1),
            field=field,
            rng=self.rng,
            wrapped=wrapped,
        )

    @property
    def graph(self) -> DynGraph:
        """Current graph."""
        return self.short.graph

    def update(self, u: int, v: int, w: Number):
        """Set the weight of ``(u, v)``."""
        self.short.update(u, v, w)

    def diameter(self) -> float:
        """Exact diameter w.h.p., infinity when not strongly connected."""
        graph = self.graph
        n = graph.n
        if n == 1:
            return 0.0
        if not is_strongly_connected(graph):
            return INF
        everything = np.arange(n)
        far = ~self.short.reachable(everything, everything)
        if not far.any():
            low, high = 1, self.short.bound
            while low < high:
                middle = (low + high) // 2
                within = self.short.ds.query(everything, everything, middle) != 0
                np.fill_diagonal(within, True)
                if within.all():
                    high = middle
                else:
                    low = middle + 1
            return float(low)

        hubs = sample_hitting_set(n, self.hops, self.hitting_constant, self.rng).nodes
        adjacency = graph.to_csr()
        out_of = dijkstra(adjacency, directed=True, indices=hubs)
        into = dijkstra(adjacency.transpose().tocsr(), directed=True, indices=hubs)
        tails, heads = np.nonzero(far)
        lengths = np.min(into[:, tails] + out_of[:, heads], axis=0)
        log(f"Exact diameter: {len(tails)} far pairs through {len(hubs)} hubs", LogLevel.verbose)
        return float(lengths.max())


def exact_diameter(oracle: ExactDiameterOracle) -> float:
    """See :meth:`ExactDiameterOracle.diameter`."""
    return oracle.diameter()

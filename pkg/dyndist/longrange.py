"""Long-range distances composed from a short-hop oracle and random hubs.

Every shortest path with many hops passes through a random hub set ``H`` within every ``ceil(n^s)`` consecutive
nodes with high probability, so chaining short-hop estimates through ``H`` covers all pairs. ``H`` is resampled after
every update, so an adversary learns nothing about it from the answers.
"""

from math import ceil, floor, isinf
from typing import Final, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import DirectedInput
from .ff_poly import FieldConfig, make_rng
from .graphenc import DEFAULT_HITTING_CONSTANT, DynGraph, HittingSet, sample_hitting_set
from .logging import log
from .minplus import minplus_approx, minplus_power
from .polymatrix import check_index_set, normalize_index_set
from .shorthop import ScaledOracleBank, ShortHopOracle
from .types import INF, DistMatrix, IndexSet, LogLevel, Number


APSP_LAYERS: Final[int] = 4


def hop_bound(n: int, s: float) -> int:
    """``max(1, ceil(n^s))``."""
    return max(1, ceil(n**s))


def build_short_hop(
    graph: DynGraph,
    eps: float,
    s: float,
    mu: float,
    nu: Optional[float],
    field: Optional[FieldConfig],
    rng: np.random.Generator,
    wrapped: bool,
    reach: int = 1,
    integral: Optional[bool] = None,
) -> ShortHopOracle | ScaledOracleBank:
    """Short-hop oracle covering every path of at most ``reach ceil(n^s)`` hops.

    Integer weights get a :class:`ShortHopOracle` with value bound ``W reach ceil(n^s)``; real weights get a
    :class:`ScaledOracleBank`. ``integral`` overrides the check of the current weights, for callers that know
    real weights will arrive later.
    """
    hops = reach * hop_bound(graph.n, s)
    if integral is None:
        integral = graph.is_integral()
    if integral and float(graph.weight_cap()).is_integer():
        bound = int(graph.weight_cap()) * hops
        return ShortHopOracle(graph, eps, mu=mu, nu=nu, bound=bound, field=field, rng=rng, wrapped=wrapped)
    return ScaledOracleBank(graph, eps, mu=mu, nu=nu, hop_bound=hops, field=field, rng=rng, wrapped=wrapped)


class APSPOracle:
    """Dynamic (1+eps)-approximate distances between arbitrary node sets."""

    short: ShortHopOracle | ScaledOracleBank
    eps: Final[float]
    hops: Final[int]
    hitting_constant: Final[float]
    rng: np.random.Generator
    hubs: HittingSet
    d_vh: DistMatrix
    d_hv: DistMatrix
    through: DistMatrix

    def __init__(
        self,
        graph: DynGraph,
        eps: float = 0.5,
        s: float = 0.5,
        mu: float = 0.5,
        nu: Optional[float] = None,
        field: Optional[FieldConfig] = None,
        rng: Optional[np.random.Generator] = None,
        hitting_constant: float = DEFAULT_HITTING_CONSTANT,
        wrapped: bool = True,
        integral: Optional[bool] = None,
    ):
        """Build the short-hop oracle and the first hub tables.

        Args:
            graph (DynGraph): Graph; copied.
            eps (float, optional): Approximation parameter. Defaults to 0.5.
            s (float, optional): Hop bound exponent. Defaults to 0.5.
            mu (float, optional): Slice reset period exponent. Defaults to 0.5.
            nu (float, optional): Exact structure reset period exponent. Defaults to ``mu``.
            field (FieldConfig, optional): Field. Defaults to Z_p with p = 2^61 - 1.
            rng (np.random.Generator, optional): Source of coefficients and hubs. Defaults to a Philox generator.
            hitting_constant (float, optional): Hub sample size constant. Defaults to 3.
            wrapped (bool, optional): Spread resets. Defaults to True.
            integral (bool, optional): Whether every weight, now and later, is an integer. Defaults to a check of
                the current weights.
        """
        self.eps = eps
        self.rng = rng or make_rng()
        self.hops = hop_bound(graph.n, s)
        self.hitting_constant = hitting_constant
        self.layer = eps / (2 * APSP_LAYERS)
        self.short = build_short_hop(graph, self.layer, s, mu, nu, field, self.rng, wrapped, integral=integral)
        self._refresh()

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.short.n

    @property
    def graph(self) -> DynGraph:
        """Current graph."""
        return self.short.graph

    def _refresh(self):
        everything = np.arange(self.n)
        self.hubs = sample_hitting_set(self.n, self.hops, self.hitting_constant, self.rng)
        self.d_vh = self.short.batch_query(everything, self.hubs.nodes)
        self.d_hv = self.short.batch_query(self.hubs.nodes, everything)
        closure = minplus_power(self.d_vh[self.hubs.nodes], self.layer)
        self.through = minplus_approx(self.d_vh, closure, self.layer)
        log(f"APSP refresh with {len(self.hubs)} hubs", LogLevel.verbose)

    def update(self, u: int, v: int, w: Number):
        """Set the weight of ``(u, v)`` and rebuild the hub tables."""
        self.short.update(u, v, w)
        self._refresh()

    def query(self, rows: IndexSet, cols: IndexSet) -> DistMatrix:
        """Estimates for ``rows x cols``, each within ``[dist, (1+eps) dist]`` w.h.p.

        Raises:
            IndexOutOfRange: If an index set is invalid.
        """
        r = check_index_set(rows, self.n)
        c = check_index_set(cols, self.n)
        result = self.short.batch_query(r, c)
        if len(self.hubs):
            result = np.minimum(result, minplus_approx(self.through[r], self.d_hv[:, c], self.layer))
        result[r[:, None] == c[None, :]] = 0.0
        return result

    def distance(self, u: int, v: int) -> float:
        """Estimate for one pair."""
        return float(self.query([u], [v])[0, 0])

    def explicit_update(self, u: int, v: int, w: Number) -> DistMatrix:
        """Update, then return the full estimate matrix."""
        self.update(u, v, w)
        everything = np.arange(self.n)
        return self.query(everything, everything)


class SSSPOracle:
    """Dynamic (1+eps)-approximate distances from one source."""

    short: ShortHopOracle | ScaledOracleBank
    source: int
    hops: Final[int]
    hitting_constant: Final[float]
    rng: np.random.Generator

    def __init__(
        self,
        graph: DynGraph,
        source: int = 0,
        eps: float = 0.5,
        s: float = 0.5,
        mu: float = 0.5,
        nu: Optional[float] = None,
        field: Optional[FieldConfig] = None,
        rng: Optional[np.random.Generator] = None,
        hitting_constant: float = DEFAULT_HITTING_CONSTANT,
        wrapped: bool = True,
        integral: Optional[bool] = None,
    ):
        """Build the short-hop oracle.

        Args:
            graph (DynGraph): Graph; copied.
            source (int, optional): Source node. Defaults to 0.
            eps (float, optional): Approximation parameter. Defaults to 0.5.
            s (float, optional): Hop bound exponent. Defaults to 0.5.
            mu (float, optional): Slice reset period exponent. Defaults to 0.5.
            nu (float, optional): Exact structure reset period exponent. Defaults to ``mu``.
            field (FieldConfig, optional): Field. Defaults to Z_p with p = 2^61 - 1.
            rng (np.random.Generator, optional): Source of coefficients and hubs. Defaults to a Philox generator.
            hitting_constant (float, optional): Hub sample size constant. Defaults to 3.
            wrapped (bool, optional): Spread resets. Defaults to True.
            integral (bool, optional): Whether every weight, now and later, is an integer. Defaults to a check of
                the current weights.
        """
        check_index_set([source], graph.n)
        self.source = source
        self.rng = rng or make_rng()
        self.hops = hop_bound(graph.n, s)
        self.hitting_constant = hitting_constant
        self.short = build_short_hop(graph, eps / 2, s, mu, nu, field, self.rng, wrapped, integral=integral)

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.short.n

    @property
    def graph(self) -> DynGraph:
        """Current graph."""
        return self.short.graph

    def distances(self, source: Optional[int] = None) -> DistMatrix:
        """Estimated distances from ``source`` (the current source by default) to every node.

        Short-hop estimates from the source and from fresh hubs form an overlay graph; Dijkstra on the overlay
        chains them into long paths.
        """
        source = self.source if source is None else source
        check_index_set([source], self.n)
        hubs = sample_hitting_set(self.n, self.hops, self.hitting_constant, self.rng)
        tails = np.union1d(hubs.nodes, [source]).astype(np.int64)
        estimates = self.short.batch_query(tails, np.arange(self.n))
        x, y = np.nonzero(np.isfinite(estimates) & (estimates > 0))
        overlay = csr_matrix((estimates[x, y], (tails[x], y)), shape=(self.n, self.n))
        through = dijkstra(overlay, directed=True, indices=source)
        row = np.minimum(through, estimates[np.searchsorted(tails, source)])
        row[source] = 0.0
        return row

    def update(self, u: int, v: int, w: Number) -> DistMatrix:
        """Set the weight of ``(u, v)`` and return the new distance row."""
        self.short.update(u, v, w)
        return self.distances()


class UndirectedOracle:
    """Dynamic (1+eps)-approximate distances for undirected graphs with integer weights at most ``W``.

    Nodes are assigned to a nearby hub; far pairs are answered through the closure of the hub-to-hub estimates plus
    an additive slack that is small relative to their distance.
    """

    short: ShortHopOracle
    eps: Final[float]
    layer: Final[float]
    hops: Final[int]
    weight_cap: Final[float]
    hitting_constant: Final[float]
    rng: np.random.Generator
    hubs: np.ndarray
    assign: np.ndarray
    delta: DistMatrix

    def __init__(
        self,
        graph: DynGraph,
        eps: float = 0.5,
        s: float = 0.5,
        mu: float = 0.5,
        nu: Optional[float] = None,
        field: Optional[FieldConfig] = None,
        rng: Optional[np.random.Generator] = None,
        hitting_constant: float = DEFAULT_HITTING_CONSTANT,
        wrapped: bool = True,
    ):
        """Build the short-hop oracle and the first hub assignment.

        Args:
            graph (DynGraph): Undirected integer-weighted graph; copied.
            eps (float, optional): Approximation parameter. Defaults to 0.5.
            s (float, optional): Hop bound exponent. Defaults to 0.5.
            mu (float, optional): Slice reset period exponent. Defaults to 0.5.
            nu (float, optional): Exact structure reset period exponent. Defaults to ``mu``.
            field (FieldConfig, optional): Field. Defaults to Z_p with p = 2^61 - 1.
            rng (np.random.Generator, optional): Source of coefficients and hubs. Defaults to a Philox generator.
            hitting_constant (float, optional): Hub sample size constant. Defaults to 3.
            wrapped (bool, optional): Spread resets. Defaults to True.

        Raises:
            DirectedInput: If the graph is directed.
            ValueError: If a weight is not an integer.
        """
        if graph.directed:
            raise DirectedInput("The undirected oracle needs an undirected graph")
        if not graph.is_integral():
            raise ValueError("The undirected oracle needs integer weights")
        self.eps = eps
        self.layer = eps / 6
        self.rng = rng or make_rng()
        self.hops = hop_bound(graph.n, s)
        self.weight_cap = float(ceil(graph.weight_cap()))
        self.hitting_constant = hitting_constant
        bound = int(self.weight_cap) * self.hops
        self.short = ShortHopOracle(
            graph, self.layer, mu=mu, nu=nu, bound=bound, field=field, rng=self.rng, wrapped=wrapped
        )
        self._refresh()

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.short.n

    @property
    def graph(self) -> DynGraph:
        """Current graph."""
        return self.short.graph

    @property
    def radius(self) -> float:
        """Largest true node-to-hub distance a hitting set guarantees."""
        return 0.25 * self.weight_cap * self.hops * self.layer

    @property
    def reach(self) -> float:
        """Largest estimated node-to-hub distance an assignment accepts; estimates overshoot by up to ``1 + layer``."""
        return (1 + self.layer) * self.radius

    @property
    def slack(self) -> float:
        """Additive term of hub answers, covering both assigned endpoints."""
        return 2 * self.reach

    def _refresh(self, hubs: Optional[IndexSet] = None):
        if hubs is None:
            window = max(1, floor(self.hops * self.layer / 4))
            self.hubs = sample_hitting_set(self.n, window, self.hitting_constant, self.rng).nodes
        else:
            self.hubs = normalize_index_set(hubs, self.n)
        if self.hubs.size == 0:
            self.assign = np.full(self.n, -1, dtype=np.int64)
            self.delta = np.zeros((0, 0))
            return
        to_hubs = self.short.batch_query(np.arange(self.n), self.hubs)
        nearest = np.argmin(to_hubs, axis=1)
        near_enough = to_hubs[np.arange(self.n), nearest] <= self.reach
        self.assign = np.where(near_enough, nearest, -1).astype(np.int64)
        self.delta = minplus_power(to_hubs[self.hubs], self.layer)
        log(f"Undirected refresh: {len(self.hubs)} hubs, {int((self.assign < 0).sum())} unassigned", LogLevel.verbose)

    def update(self, u: int, v: int, w: Number):
        """Set the weight of ``{u, v}`` and rebuild the hub assignment."""
        if not isinf(w) and w > self.weight_cap:
            raise ValueError(f"Weight {w} above the cap {self.weight_cap}")
        self.short.update(u, v, w)
        self._refresh()

    def hub_estimates(self, rows: IndexSet, cols: IndexSet) -> DistMatrix:
        """Hub-closure term alone: ``Delta[x_u, x_v] + slack``, infinite when an endpoint has no hub."""
        r = check_index_set(rows, self.n)
        c = check_index_set(cols, self.n)
        result = np.full((len(r), len(c)), INF)
        hub_r, hub_c = self.assign[r], self.assign[c]
        known = (hub_r[:, None] >= 0) & (hub_c[None, :] >= 0)
        if known.any():
            values = self.delta[np.ix_(np.maximum(hub_r, 0), np.maximum(hub_c, 0))] + self.slack
            result[known] = values[known]
        return result

    def query(self, rows: IndexSet, cols: IndexSet) -> DistMatrix:
        """Estimates for ``rows x cols``, each within ``[dist, (1+eps) dist]`` w.h.p."""
        r = check_index_set(rows, self.n)
        c = check_index_set(cols, self.n)
        result = np.minimum(self.short.batch_query(r, c), self.hub_estimates(r, c))
        result[r[:, None] == c[None, :]] = 0.0
        return result

    def distance(self, u: int, v: int) -> float:
        """Estimate for one pair."""
        return float(self.query([u], [v])[0, 0])

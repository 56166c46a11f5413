"""Dynamic (1+eps)-approximate distances up to a bound.

:class:`ShortHopOracle` handles integer weights: a distance ``x <= bound`` is detected as the smallest threshold
``d`` in a geometric set with a nonzero slice ``(M^-1)^[d]``. :class:`ScaledOracleBank` handles real weights by
keeping one integer oracle per power-of-two scale of rounded weights, which bounds the hop count instead of the value.
"""

from fractions import Fraction
from math import ceil, isinf, log2, sqrt
from typing import Final, List, Optional, Sequence

import numpy as np

from .dyninv import SliceInverseDS, WorstCaseWrapper
from .ff_poly import FieldConfig, make_rng
from .graphenc import DynGraph, edge_update_to_element_update, encode
from .logging import log
from .polymatrix import check_index_set
from .types import INF, DistMatrix, IndexSet, LogLevel, Number


def threshold_set(eps: float, bound: int) -> List[int]:
    """Thresholds ``floor((1+eps)^k)`` clamped to ``bound``, deduplicated, with ``bound`` itself included.

    Every integer ``x`` in ``[1, bound]`` has a threshold ``d`` with ``x <= d <= (1+eps) x``.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if bound < 1:
        return []
    thresholds = set()
    x = 1.0
    while x < bound:
        thresholds.add(min(int(x), bound))
        x *= 1 + eps
    thresholds.add(bound)
    return sorted(thresholds)


def _caps(n: int, mu: float, nu: Optional[float]) -> tuple[int, int]:
    mu_cap = max(1, ceil(n**mu))
    nu_cap = mu_cap if nu is None else max(1, ceil(n**nu))
    return mu_cap, nu_cap


class ShortHopOracle:
    """Dynamic distance oracle for integer weights, exact up to a factor (1+eps) for distances up to ``bound``."""

    graph: DynGraph
    eps: Final[float]
    bound: Final[int]
    thresholds: Final[List[int]]
    ds: SliceInverseDS | WorstCaseWrapper

    def __init__(
        self,
        graph: DynGraph,
        eps: float = 0.5,
        s: float = 0.5,
        mu: float = 0.5,
        nu: Optional[float] = None,
        bound: Optional[int] = None,
        thresholds: Optional[Sequence[int]] = None,
        field: Optional[FieldConfig] = None,
        rng: Optional[np.random.Generator] = None,
        wrapped: bool = True,
    ):
        """Encode the graph and build the dynamic inverse.

        Args:
            graph (DynGraph): Integer-weighted graph; copied.
            eps (float, optional): Approximation parameter. Defaults to 0.5.
            s (float, optional): Value bound exponent, used when ``bound`` is not given. Defaults to 0.5.
            mu (float, optional): Slice reset period exponent. Defaults to 0.5.
            nu (float, optional): Exact structure reset period exponent. Defaults to ``mu``.
            bound (int, optional): Largest tracked distance value. Defaults to ``ceil(n^s)``.
            thresholds (Sequence[int], optional): Override of the geometric threshold set. Defaults to None.
            field (FieldConfig, optional): Field. Defaults to Z_p with p = 2^61 - 1.
            rng (np.random.Generator, optional): Coefficient source. Defaults to a Philox generator with key 0.
            wrapped (bool, optional): Spread resets with :class:`WorstCaseWrapper`. Defaults to True.

        Raises:
            ValueError: If a weight is not an integer.
            ConfigError: If the field is too small for this graph.
        """
        self.graph = graph.copy()
        n = graph.n
        self.eps = eps
        self.bound = max(1, ceil(n**s)) if bound is None else int(bound)
        self.thresholds = sorted(set(thresholds)) if thresholds is not None else threshold_set(eps, self.bound)
        if self.bound not in self.thresholds:
            self.thresholds.append(self.bound)
        self.field = field or FieldConfig()
        self.field.check_budget(self.bound + 1, n)
        rng = rng or make_rng()

        m, self.encoding = encode(self.graph, self.bound + 1, self.field, rng)
        mu_cap, nu_cap = _caps(n, mu, nu)
        if wrapped:
            self.ds = WorstCaseWrapper(m, self.thresholds, mu_cap, nu_cap)
        else:
            self.ds = SliceInverseDS(m, self.thresholds, mu_cap, nu_cap)
        log(
            f"Short-hop oracle: n={n}, bound={self.bound}, {len(self.thresholds)} thresholds, reset every {mu_cap}",
            LogLevel.verbose,
        )

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.graph.n

    def update(self, u: int, v: int, w: Number):
        """Set the weight of ``(u, v)`` to an integer or infinity.

        Raises:
            ValueError: If ``w`` is finite and not an integer, or out of range.
        """
        if not isinf(w) and not float(w).is_integer():
            raise ValueError(f"Weight {w} is not an integer")
        old = self.graph.set_weight(u, v, w)
        arcs = [(u, v)] if self.graph.directed else [(u, v), (v, u)]
        for a, b in arcs:
            i, j, delta = edge_update_to_element_update(self.encoding, a, b, old, w)
            if delta.is_zero():
                continue
            self.ds.update(i, j, -delta)

    def batch_query(self, rows: IndexSet, cols: IndexSet) -> DistMatrix:
        """Estimates for all pairs in ``rows x cols``.

        Thresholds are scanned in increasing order, each one queried only for the rows and columns that still hold an
        unresolved pair. Unresolved pairs stay infinite.

        Raises:
            IndexOutOfRange: If an index set is invalid.
        """
        r = check_index_set(rows, self.n)
        c = check_index_set(cols, self.n)
        diagonal = r[:, None] == c[None, :]
        result = np.full((len(r), len(c)), INF)
        unresolved = ~diagonal
        for d in self.thresholds:
            active_rows = np.flatnonzero(unresolved.any(axis=1))
            if active_rows.size == 0:
                break
            active_cols = np.flatnonzero(unresolved[active_rows].any(axis=0))
            block = np.ix_(active_rows, active_cols)
            hit = unresolved[block] & (self.ds.query(r[active_rows], c[active_cols], d) != 0)
            result[block] = np.where(hit, float(d), result[block])
            unresolved[block] &= ~hit
        result[diagonal] = 0.0
        return result

    def distance(self, u: int, v: int) -> float:
        """Estimate for one pair."""
        return float(self.batch_query([u], [v])[0, 0])

    def reachable(self, rows: IndexSet, cols: IndexSet) -> np.ndarray:
        """Whether a walk of value at most ``bound`` connects each pair, from the top slice only."""
        r = check_index_set(rows, self.n)
        c = check_index_set(cols, self.n)
        return (self.ds.query(r, c, self.bound) != 0) | (r[:, None] == c[None, :])


def scaled_weight(c: float, a: int, b: int) -> float:
    """Rounded weight ``ceil(a * c / b)`` of scale ``b``, infinity when ``c > b``."""
    if isinf(c) or c > b:
        return INF
    return float(ceil(Fraction(a) * Fraction(c) / Fraction(b)))


class ScaledOracleBank:
    """Dynamic (1+eps)-approximate distances for real weights along paths of at most ``hop_bound`` hops.

    Scale ``i`` keeps the edges of weight ``c <= 2^i`` with weight ``ceil(A c / 2^i)`` in an integer oracle
    tracking values up to ``A + hop_bound``; an estimate ``e`` of scale ``i`` means a distance of at most
    ``e 2^i / A``.
    """

    graph: DynGraph
    eps: Final[float]
    hop_bound: Final[int]
    scale_factor: Final[int]
    scales: Final[List[int]]
    oracles: Final[List[ShortHopOracle]]

    def __init__(
        self,
        graph: DynGraph,
        eps: float = 0.5,
        s: float = 0.5,
        mu: float = 0.5,
        nu: Optional[float] = None,
        hop_bound: Optional[int] = None,
        field: Optional[FieldConfig] = None,
        rng: Optional[np.random.Generator] = None,
        wrapped: bool = True,
    ):
        """Build one integer oracle per scale.

        Args:
            graph (DynGraph): Graph with weights in ``[1, W]``; copied.
            eps (float, optional): Approximation parameter. Defaults to 0.5.
            s (float, optional): Hop bound exponent, used when ``hop_bound`` is not given. Defaults to 0.5.
            mu (float, optional): Slice reset period exponent. Defaults to 0.5.
            nu (float, optional): Exact structure reset period exponent. Defaults to ``mu``.
            hop_bound (int, optional): Hop bound. Defaults to ``ceil(n^s)``.
            field (FieldConfig, optional): Field shared by all scales. Defaults to Z_p with p = 2^61 - 1.
            rng (np.random.Generator, optional): Coefficient source. Defaults to a Philox generator with key 0.
            wrapped (bool, optional): Spread resets in every scale. Defaults to True.
        """
        self.graph = graph.copy()
        n = graph.n
        self.eps = eps
        self.hop_bound = max(1, ceil(n**s)) if hop_bound is None else int(hop_bound)
        inner_eps = sqrt(1 + eps) - 1
        self.scale_factor = ceil(2 * self.hop_bound / inner_eps)
        top = max(0, ceil(log2(max(2.0, n * graph.weight_cap()))))
        self.scales = [2**i for i in range(top + 1)]
        field = field or FieldConfig()
        rng = rng or make_rng()
        self.oracles = [
            ShortHopOracle(
                self._scaled_graph(scale),
                eps=inner_eps,
                mu=mu,
                nu=nu,
                bound=self.scale_factor + self.hop_bound,
                field=field,
                rng=rng,
                wrapped=wrapped,
            )
            for scale in self.scales
        ]
        log(f"Scaled bank: {len(self.scales)} scales, A={self.scale_factor}", LogLevel.verbose)

    def _scaled_graph(self, scale: int) -> DynGraph:
        result = DynGraph(self.graph.n, self.graph.directed)
        for u, v, w in self.graph.edges():
            rounded = scaled_weight(w, self.scale_factor, scale)
            if not isinf(rounded):
                result.set_weight(u, v, rounded)
        return result

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.graph.n

    def update(self, u: int, v: int, w: Number):
        """Set the weight of ``(u, v)``; every scale receives its rounded weight."""
        old = self.graph.set_weight(u, v, w)
        for scale, oracle in zip(self.scales, self.oracles):
            rounded = scaled_weight(float(w), self.scale_factor, scale)
            if isinf(rounded) and isinf(scaled_weight(old, self.scale_factor, scale)):
                continue
            oracle.update(u, v, rounded)

    def batch_query(self, rows: IndexSet, cols: IndexSet) -> DistMatrix:
        """Minimum over scales of the descaled estimates."""
        best = None
        for scale, oracle in zip(self.scales, self.oracles):
            estimate = oracle.batch_query(rows, cols) * (scale / self.scale_factor)
            best = estimate if best is None else np.minimum(best, estimate)
        return best  # type: ignore[return-value]

    def distance(self, u: int, v: int) -> float:
        """Estimate for one pair."""
        return float(self.batch_query([u], [v])[0, 0])

"""Dynamic weighted graphs and their polynomial-matrix encoding.

A graph with integer weights becomes ``M = I - A`` where ``A[u, v] = a_uv X^c_uv`` for every edge of weight
``c_uv < h`` and ``A[v, v] = a_vv X``, with uniform random field coefficients. A walk of total weight ``d`` from
``u`` to ``v`` exists iff the degree-``d`` coefficient of ``(M^-1)[u, v]`` is a nonzero polynomial in the
coefficients, so with high probability it is nonzero after sampling.
"""

from math import ceil, isinf, log as ln
from typing import Dict, Final, Iterator, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from .ff_poly import FieldConfig, TruncPoly, make_rng
from .polymatrix import PolyMatrix
from .types import INF, Number


DEFAULT_HITTING_CONSTANT: Final[float] = 3.0


class DynGraph:
    """Mutable weighted graph on nodes ``0..n-1``. Missing edges have weight infinity."""

    n: Final[int]
    directed: Final[bool]
    W: float
    weights: Dict[Tuple[int, int], float]

    def __init__(
        self,
        n: int,
        directed: bool = True,
        W: float = INF,
        edges: Optional[List[Tuple[int, int, Number]]] = None,
    ):
        """Create a graph.

        Args:
            n (int): Number of nodes, at least 1.
            directed (bool, optional): Whether edges are one-way. Defaults to True.
            W (float, optional): Largest allowed finite weight. Defaults to unbounded.
            edges (list of (u, v, w), optional): Initial edges. Defaults to None.
        """
        if n < 1:
            raise ValueError(f"A graph needs at least one node, got {n}")
        self.n = n
        self.directed = directed
        self.W = float(W)
        self.weights = {}
        for u, v, w in edges or []:
            self.set_weight(u, v, w)

    def _check_node(self, u: int):
        if not 0 <= u < self.n:
            raise IndexError(f"Node {u} outside [0, {self.n})")

    def _keys(self, u: int, v: int) -> List[Tuple[int, int]]:
        return [(u, v)] if self.directed else [(u, v), (v, u)]

    def weight(self, u: int, v: int) -> float:
        """Weight of ``(u, v)``, infinity if absent."""
        return self.weights.get((u, v), INF)

    def set_weight(self, u: int, v: int, w: Number) -> float:
        """Set the weight of ``(u, v)``; infinity deletes the edge.

        Raises:
            ValueError: On self-loops or finite weights outside ``[1, W]``.

        Returns:
            float: The previous weight.
        """
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise ValueError(f"Self-loop on node {u}")
        w = float(w)
        if not isinf(w) and not 1 <= w <= self.W:
            raise ValueError(f"Weight {w} outside [1, {self.W}]")
        old = self.weight(u, v)
        for key in self._keys(u, v):
            if isinf(w):
                self.weights.pop(key, None)
            else:
                self.weights[key] = w
        return old

    def arcs(self) -> Iterator[Tuple[int, int, float]]:
        """Every stored ordered pair, both directions for undirected graphs."""
        for (u, v), w in sorted(self.weights.items()):
            yield u, v, w

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        """Every edge once."""
        for u, v, w in self.arcs():
            if self.directed or u < v:
                yield u, v, w

    @property
    def m(self) -> int:
        """Number of edges."""
        return len(self.weights) if self.directed else len(self.weights) // 2

    def is_integral(self) -> bool:
        """Whether every weight is an integer."""
        return all(w.is_integer() for w in self.weights.values())

    def max_weight(self) -> float:
        """Largest finite weight, 1 for an edgeless graph."""
        return max(self.weights.values(), default=1.0)

    def weight_cap(self) -> float:
        """``W`` if bounded, otherwise the largest present weight."""
        return self.W if not isinf(self.W) else self.max_weight()

    def to_csr(self) -> csr_matrix:
        """Sparse adjacency matrix of weights."""
        if not self.weights:
            return csr_matrix((self.n, self.n))
        rows = [u for u, _ in self.weights]
        cols = [v for _, v in self.weights]
        return csr_matrix((list(self.weights.values()), (rows, cols)), shape=(self.n, self.n))

    def copy(self) -> "DynGraph":
        """Independent copy."""
        result = DynGraph(self.n, self.directed, self.W)
        result.weights = dict(self.weights)
        return result

    def __repr__(self) -> str:
        """Get a string representation of the graph."""
        kind = "directed" if self.directed else "undirected"
        return f"DynGraph(n={self.n}, m={self.m}, {kind}, W={self.W})"


class Encoding:
    """Random coefficients of an encoded graph, keyed by ordered node pair (diagonal included)."""

    h: Final[int]
    field: Final[FieldConfig]
    rng: np.random.Generator
    coeffs: Dict[Tuple[int, int], int]

    def __init__(self, h: int, field: FieldConfig, rng: np.random.Generator):
        """Create an empty encoding."""
        self.h = h
        self.field = field
        self.rng = rng
        self.coeffs = {}


def encode(graph: DynGraph, h: int, field: FieldConfig, rng: np.random.Generator) -> Tuple[PolyMatrix, Encoding]:
    """Encode an integer-weighted graph as ``M = I - A`` truncated at X^h.

    Args:
        graph (DynGraph): Graph with integer weights.
        h (int): Degree bound; edges of weight at least h are dropped.
        field (FieldConfig): Coefficient field.
        rng (np.random.Generator): Coefficient source.

    Raises:
        ValueError: If a weight is not an integer.

    Returns:
        (PolyMatrix, Encoding): The matrix and its coefficients.
    """
    if not graph.is_integral():
        raise ValueError("Only integer weights can be encoded")
    n, p = graph.n, field.p
    encoding = Encoding(h, field, rng)
    slices = np.zeros((h, n, n), dtype=np.int64)
    slices[0] = np.eye(n, dtype=np.int64)

    diagonal = field.sample(rng, n)
    for v in range(n):
        encoding.coeffs[(v, v)] = int(diagonal[v])
    if h > 1:
        slices[1, np.arange(n), np.arange(n)] = (-diagonal) % p

    arcs = list(graph.arcs())
    values = field.sample(rng, len(arcs))
    for (u, v, w), a in zip(arcs, values.tolist()):
        encoding.coeffs[(u, v)] = a
        if int(w) < h:
            slices[int(w), u, v] = (slices[int(w), u, v] - a) % p
    return PolyMatrix(slices, field), encoding


def edge_update_to_element_update(
    encoding: Encoding, u: int, v: int, old_w: Number, new_w: Number, fresh: bool = True
) -> Tuple[int, int, TruncPoly]:
    """Change of ``A[u, v]`` caused by a weight change ``old_w -> new_w``.

    Args:
        encoding (Encoding): Coefficients; updated in place.
        u (int): Tail.
        v (int): Head.
        old_w (Number): Previous weight, infinity if absent.
        new_w (Number): New weight, infinity to delete.
        fresh (bool, optional): Draw a new coefficient for the new weight. Defaults to True.

    Returns:
        (int, int, TruncPoly): Row, column and ``a' X^new_w - a X^old_w``, terms of degree at least h dropped.
    """
    h, field = encoding.h, encoding.field
    delta = np.zeros(h, dtype=np.int64)
    old_a = encoding.coeffs.get((u, v))
    if not isinf(old_w) and old_a is not None and int(old_w) < h:
        delta[int(old_w)] -= old_a
    if isinf(new_w):
        encoding.coeffs.pop((u, v), None)
    else:
        a = field.sample(encoding.rng) if fresh or old_a is None else old_a
        encoding.coeffs[(u, v)] = a
        if int(new_w) < h:
            delta[int(new_w)] = (int(delta[int(new_w)]) + a) % field.p
    return u, v, TruncPoly(delta % field.p, field)


class HittingSet:
    """Random node sample meeting every window of ``hop_bound`` consecutive nodes on a path, w.h.p."""

    nodes: Final[npt.NDArray[np.int64]]
    hop_bound: Final[int]
    confidence: Final[float]

    def __init__(self, nodes: npt.NDArray[np.int64], hop_bound: int, confidence: float):
        """Wrap a sorted node array."""
        self.nodes = nodes
        self.hop_bound = hop_bound
        self.confidence = confidence

    def __len__(self) -> int:
        """Number of sampled nodes."""
        return len(self.nodes)

    def __contains__(self, node: int) -> bool:
        """Membership test."""
        return bool(np.isin(node, self.nodes))


def hitting_set_size(n: int, d: int, c: float = DEFAULT_HITTING_CONSTANT) -> int:
    """``min(n, ceil(c * n / d * ln n))``."""
    if n <= 1:
        return n
    return min(n, ceil(c * n / d * ln(n)))


def sample_hitting_set(
    n: int, d: int, c: float = DEFAULT_HITTING_CONSTANT, rng: Optional[np.random.Generator] = None
) -> HittingSet:
    """Sample nodes uniformly without replacement so that every ``d``-hop window is hit w.h.p.

    Raises:
        ValueError: If ``d`` is below 1.
    """
    if d < 1:
        raise ValueError(f"Hop bound must be at least 1, got {d}")
    rng = rng or make_rng()
    nodes = np.sort(rng.choice(n, size=hitting_set_size(n, d, c), replace=False)).astype(np.int64)
    return HittingSet(nodes, d, c)


def is_strongly_connected(graph: DynGraph) -> bool:
    """Forward and backward search from node 0 both reach every node."""
    if graph.n <= 1:
        return True
    adjacency = graph.to_csr()
    forward = breadth_first_order(adjacency, 0, directed=True, return_predecessors=False)
    if len(forward) < graph.n:
        return False
    backward = breadth_first_order(adjacency.transpose().tocsr(), 0, directed=True, return_predecessors=False)
    return len(backward) == graph.n

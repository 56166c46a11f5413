"""Brute-force references the engine is checked against.

Everything here is slow on purpose and uses different loops from the production code it checks.
"""

import heapq
from collections import deque
from typing import List, NamedTuple, Tuple

import numpy as np
import numpy.typing as npt

from .errors import BadForm, ShapeMismatch
from .graphenc import DynGraph
from .polymatrix import PolyMatrix
from .types import INF, DistMatrix


class ExactMetrics(NamedTuple):
    """Metrics derived from exact distances."""

    diameter: float
    radius: float
    eccentricities: npt.NDArray[np.float64]
    closeness: npt.NDArray[np.float64]


def _adjacency(graph: DynGraph) -> List[List[Tuple[int, float]]]:
    adjacency: List[List[Tuple[int, float]]] = [[] for _ in range(graph.n)]
    for u, v, w in graph.arcs():
        adjacency[u].append((v, w))
    return adjacency


def bfs_apsp(graph: DynGraph) -> Tuple[DistMatrix, DistMatrix]:
    """Unweighted distances and hop counts by one breadth-first search per node."""
    adjacency = _adjacency(graph)
    dist = np.full((graph.n, graph.n), INF)
    for source in range(graph.n):
        dist[source, source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v, _ in adjacency[u]:
                if dist[source, v] == INF:
                    dist[source, v] = dist[source, u] + 1
                    queue.append(v)
    return dist, dist.copy()


def dijkstra_apsp(graph: DynGraph) -> Tuple[DistMatrix, DistMatrix]:
    """Weighted distances, and the fewest hops among shortest paths, by one Dijkstra per node."""
    adjacency = _adjacency(graph)
    dist = np.full((graph.n, graph.n), INF)
    hops = np.full((graph.n, graph.n), INF)
    for source in range(graph.n):
        heap = [(0.0, 0, source)]
        while heap:
            d, k, u = heapq.heappop(heap)
            if (d, k) >= (dist[source, u], hops[source, u]):
                continue
            dist[source, u], hops[source, u] = d, k
            for v, w in adjacency[u]:
                if (d + w, k + 1) < (dist[source, v], hops[source, v]):
                    heapq.heappush(heap, (d + w, k + 1, v))
    return dist, hops


def closure_apsp(graph: DynGraph) -> DistMatrix:
    """Floyd-Warshall closure."""
    dist = np.full((graph.n, graph.n), INF)
    np.fill_diagonal(dist, 0.0)
    for u, v, w in graph.arcs():
        dist[u, v] = min(dist[u, v], w)
    for k in range(graph.n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return dist


def naive_matmul(a: npt.NDArray, b: npt.NDArray, p: int) -> npt.NDArray[np.int64]:
    """Triple loop over Python ints."""
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"Cannot multiply {a.shape} by {b.shape}")
    result = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            total = 0
            for k in range(a.shape[1]):
                total += int(a[i, k]) * int(b[k, j])
            result[i, j] = total % p
    return result


def naive_poly_inverse(m: PolyMatrix) -> PolyMatrix:
    """Inverse of ``M = I - N`` from ``M^-1 = I + N M^-1``, one degree at a time, in exact integer arithmetic.

    Raises:
        BadForm: If the constant coefficient is not the identity.
    """
    n, h, p = m.rows, m.h, m.field.p
    if not np.array_equal(m.slices[0], np.eye(n, dtype=np.int64)):
        raise BadForm("Constant coefficient is not the identity")
    strict = [((-m.slices[k]) % p).astype(object) for k in range(h)]
    inverse = [np.eye(n, dtype=np.int64).astype(object)]
    for k in range(1, h):
        total = np.zeros((n, n), dtype=object)
        for i in range(1, k + 1):
            total = total + strict[i].dot(inverse[k - i])
        inverse.append(total % p)
    return PolyMatrix(np.array([slice_.astype(np.int64) for slice_ in inverse]), m.field)


def exact_metrics(graph: DynGraph) -> ExactMetrics:
    """Diameter, radius, eccentricities and closeness from exact distances.

    Disconnected graphs get infinite diameter and radius and zero closeness.
    """
    dist, _ = dijkstra_apsp(graph)
    eccentricities = dist.max(axis=1)
    n = graph.n
    if n == 1:
        return ExactMetrics(0.0, 0.0, np.zeros(1), np.zeros(1))
    if not np.isfinite(dist).all():
        return ExactMetrics(INF, INF, eccentricities, np.zeros(n))
    closeness = (n - 1) / dist.sum(axis=0)
    return ExactMetrics(float(eccentricities.max()), float(eccentricities.min()), eccentricities, closeness)

"""(min, +) algebra on distance matrices.

Entries are nonnegative floats with ``inf`` for "no path"; ``inf`` saturates under addition.
"""

from math import ceil, floor, log2
from typing import Final, Optional

import numpy as np

from .errors import ShapeMismatch
from .graphenc import HittingSet
from .types import INF, DistMatrix


ROW_CHUNK: Final[int] = 64


def _check_product(a: DistMatrix, b: DistMatrix):
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"Cannot (min,+)-multiply {a.shape} by {b.shape}")


def layer_eps(eps: float, layers: int) -> float:
    """Per-layer error when ``layers`` approximate steps must compose to at most ``1 + eps``."""
    return eps / (2 * max(1, layers))


def minplus_exact(a: DistMatrix, b: DistMatrix) -> DistMatrix:
    """``C[i, j] = min_k A[i, k] + B[k, j]``.

    Raises:
        ShapeMismatch: If the inner dimensions disagree.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_product(a, b)
    rows, inner = a.shape
    result = np.full((rows, b.shape[1]), INF)
    if inner == 0:
        return result
    for start in range(0, rows, ROW_CHUNK):
        block = a[start : start + ROW_CHUNK, :, None] + b[None, :, :]
        result[start : start + ROW_CHUNK] = block.min(axis=1)
    return result


def _round_to_scale(x: DistMatrix, resolution: int, scale: float) -> DistMatrix:
    rounded = np.full(x.shape, INF)
    kept = (x > 0) & (x <= scale)
    rounded[kept] = np.ceil(resolution * x[kept] / scale)
    rounded[x == 0] = 0.0
    return rounded


def minplus_approx(a: DistMatrix, b: DistMatrix, eps: float) -> DistMatrix:
    """(1+eps)-approximate (min,+) product by per-scale rounding.

    For every scale ``B = 2^i`` the entries up to ``B`` are rounded up to integers ``ceil(A x / B)`` with
    ``A = ceil(4 / eps)``, the integer matrices are multiplied and the result is scaled back by ``B / A``. The minimum
    over scales never underestimates and is within ``1 + eps`` of the exact product.

    Raises:
        ShapeMismatch: If the inner dimensions disagree.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_product(a, b)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    positive = np.concatenate((a[np.isfinite(a) & (a > 0)], b[np.isfinite(b) & (b > 0)]))
    if positive.size == 0:
        return minplus_exact(a, b)

    resolution = ceil(4 / eps)
    result = np.full((a.shape[0], b.shape[1]), INF)
    for i in range(floor(log2(positive.min())), ceil(log2(positive.max())) + 1):
        scale = 2.0**i
        product = minplus_exact(_round_to_scale(a, resolution, scale), _round_to_scale(b, resolution, scale))
        result = np.minimum(result, product * (scale / resolution))
    return result


def minplus_power(d: DistMatrix, eps: float) -> DistMatrix:
    """Approximate (min,+) closure by ``ceil(log2 n)`` approximate squarings, each with error ``eps / (2 log2 n)``.

    The diagonal is set to zero first.

    Raises:
        ShapeMismatch: If ``d`` is not square.
    """
    result = np.array(d, dtype=np.float64)
    if result.ndim != 2 or result.shape[0] != result.shape[1]:
        raise ShapeMismatch(f"Closure needs a square matrix, got {result.shape}")
    np.fill_diagonal(result, 0.0)
    rounds = ceil(log2(result.shape[0])) if result.shape[0] > 1 else 0
    step = layer_eps(eps, rounds)
    for _ in range(rounds):
        result = minplus_approx(result, result, step)
    return result


def extend_to_long_hops(
    d: DistMatrix, hubs: HittingSet | np.ndarray, eps: float, closure: Optional[DistMatrix] = None
) -> DistMatrix:
    """``D[V, H] * closure(D[H, H]) * D[H, V]`` with approximate products.

    Args:
        d (DistMatrix): Square never-underestimating short-hop estimates.
        hubs (HittingSet or np.ndarray): Hub nodes.
        eps (float): Error budget, split over the closure and two products.
        closure (DistMatrix, optional): Precomputed closure of ``D[H, H]``. Defaults to None.

    Returns:
        DistMatrix: Estimates along paths through hubs; all infinite when there are no hubs.
    """
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ShapeMismatch(f"Expected a square matrix, got {d.shape}")
    nodes = hubs.nodes if isinstance(hubs, HittingSet) else np.asarray(hubs, dtype=np.int64)
    if nodes.size == 0:
        return np.full(d.shape, INF)
    step = eps / 6
    if closure is None:
        closure = minplus_power(d[np.ix_(nodes, nodes)], step)
    through = minplus_approx(d[:, nodes], closure, step)
    return minplus_approx(through, d[nodes, :], step)

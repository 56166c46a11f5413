"""Dense matrices over Z_p and over truncated polynomials.

A :class:`PolyMatrix` is stored slice-major: ``slices[k]`` is the ``rows x cols`` field matrix of the coefficients
of ``X^k``. Plain field matrices (``FMatrix``) are 2-D ``int64`` arrays.
"""

from typing import Final, Optional, Sequence

import numpy as np
import numpy.typing as npt

from .errors import BadForm, DegreeMismatch, IndexOutOfRange, ShapeMismatch
from .ff_poly import FieldConfig, TruncPoly, addmod, matmul_mod, mulmod, ops, submod
from .types import FMatrix, IndexSet


STRASSEN_THRESHOLD: int = 256
BLOCK_SIZE: Final[int] = 64

__all__ = [
    "PolyMatrix",
    "fmat_mul",
    "poly_matmul",
    "polymat_mul",
    "neumann_inverse",
    "coeff_slice_product",
    "stacked_slice_product",
    "poly_scale",
    "submatrix",
    "check_index_set",
    "normalize_index_set",
    "ops",
]


def check_index_set(indices: IndexSet, size: int) -> npt.NDArray[np.int64]:
    """Validate an index set against a dimension.

    Raises:
        IndexOutOfRange: If an index is outside ``[0, size)`` or the set is not strictly increasing.
    """
    result = np.asarray(indices, dtype=np.int64).reshape(-1)
    if result.size and (result.min() < 0 or result.max() >= size):
        raise IndexOutOfRange(f"Index set {result.tolist()} outside [0, {size})")
    if result.size > 1 and np.any(np.diff(result) <= 0):
        raise IndexOutOfRange(f"Index set {result.tolist()} is not sorted and duplicate-free")
    return result


def normalize_index_set(indices: IndexSet, size: int) -> npt.NDArray[np.int64]:
    """Sort and deduplicate an index set, then validate it."""
    return check_index_set(np.unique(np.asarray(indices, dtype=np.int64)), size)


def _naive(a: FMatrix, b: FMatrix, p: int) -> FMatrix:
    return matmul_mod(a, b, p)


def _blocked(a: FMatrix, b: FMatrix, p: int, block: int = BLOCK_SIZE) -> FMatrix:
    rows, inner = a.shape
    cols = b.shape[1]
    result = np.zeros((rows, cols), dtype=np.int64)
    for i in range(0, rows, block):
        for j in range(0, cols, block):
            acc = np.zeros((min(block, rows - i), min(block, cols - j)), dtype=np.int64)
            for k in range(0, inner, block):
                acc = addmod(acc, matmul_mod(a[i : i + block, k : k + block], b[k : k + block, j : j + block], p), p)
            result[i : i + block, j : j + block] = acc
    return result


def _strassen(a: FMatrix, b: FMatrix, p: int, threshold: int) -> FMatrix:
    rows, inner = a.shape
    cols = b.shape[1]
    if min(rows, inner, cols) <= threshold:
        return matmul_mod(a, b, p)

    a = np.pad(a, ((0, rows % 2), (0, inner % 2)))
    b = np.pad(b, ((0, inner % 2), (0, cols % 2)))
    r, k, c = a.shape[0] // 2, a.shape[1] // 2, b.shape[1] // 2
    a11, a12, a21, a22 = a[:r, :k], a[:r, k:], a[r:, :k], a[r:, k:]
    b11, b12, b21, b22 = b[:k, :c], b[:k, c:], b[k:, :c], b[k:, c:]

    def mul(x, y):
        return _strassen(x, y, p, threshold)

    m1 = mul(addmod(a11, a22, p), addmod(b11, b22, p))
    m2 = mul(addmod(a21, a22, p), b11)
    m3 = mul(a11, submod(b12, b22, p))
    m4 = mul(a22, submod(b21, b11, p))
    m5 = mul(addmod(a11, a12, p), b22)
    m6 = mul(submod(a21, a11, p), addmod(b11, b12, p))
    m7 = mul(submod(a12, a22, p), addmod(b21, b22, p))

    top = np.hstack((addmod(submod(addmod(m1, m4, p), m5, p), m7, p), addmod(m3, m5, p)))
    bottom = np.hstack((addmod(m2, m4, p), addmod(addmod(submod(m1, m2, p), m3, p), m6, p)))
    return np.vstack((top, bottom))[:rows, :cols]


def fmat_mul(
    a: FMatrix,
    b: FMatrix,
    field: FieldConfig,
    method: str = "auto",
    threshold: Optional[int] = None,
) -> FMatrix:
    """Multiply two field matrices.

    All methods return the same matrix; they differ only in how the work is split.

    Args:
        a (FMatrix): Left operand.
        b (FMatrix): Right operand.
        field (FieldConfig): The field.
        method (str, optional): ``naive``, ``blocked``, ``strassen`` or ``auto``. Defaults to "auto".
        threshold (int, optional): Dimension at or below which Strassen recursion stops.
            Defaults to :data:`STRASSEN_THRESHOLD`.

    Raises:
        ShapeMismatch: If the inner dimensions disagree.

    Returns:
        FMatrix: The reduced product.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"Cannot multiply {a.shape} by {b.shape}")
    threshold = STRASSEN_THRESHOLD if threshold is None else threshold
    match method:
        case "naive":
            return _naive(a, b, field.p)
        case "blocked":
            return _blocked(a, b, field.p)
        case "strassen":
            return _strassen(a, b, field.p, max(1, threshold))
        case "auto":
            if min(a.shape[0], a.shape[1], b.shape[1]) > threshold:
                return _strassen(a, b, field.p, max(1, threshold))
            return _naive(a, b, field.p)
        case _:
            raise ValueError(f"Unknown multiplication method {method}")


def _slice_times_stack(left: FMatrix, stack: npt.NDArray[np.int64], p: int) -> npt.NDArray[np.int64]:
    if min(left.shape[0], left.shape[1], stack.shape[2]) <= STRASSEN_THRESHOLD:
        return matmul_mod(left, stack, p)
    return np.array([_strassen(left, right, p, STRASSEN_THRESHOLD) for right in stack], dtype=np.int64)


def poly_matmul(a: npt.NDArray[np.int64], b: npt.NDArray[np.int64], p: int) -> npt.NDArray[np.int64]:
    """Truncated product of two slice stacks ``(h, r, k)`` and ``(h, k, c)``; all-zero slices of ``a`` are skipped.

    Slices larger than :data:`STRASSEN_THRESHOLD` in every dimension are multiplied by Strassen's recursion.
    """
    h = a.shape[0]
    result = np.zeros((h, a.shape[1], b.shape[2]), dtype=np.int64)
    for i in range(h):
        if not a[i].any():
            continue
        result[i:] = addmod(result[i:], _slice_times_stack(a[i], b[: h - i], p), p)
    return result


def poly_scale(coeffs: npt.NDArray[np.int64], slices: npt.NDArray[np.int64], p: int) -> npt.NDArray[np.int64]:
    """Multiply every entry of a slice stack by one truncated polynomial given by its coefficients."""
    h = slices.shape[0]
    result = np.zeros_like(slices)
    for i in range(h):
        if coeffs[i] == 0:
            continue
        result[i:] = addmod(result[i:], mulmod(int(coeffs[i]), slices[: h - i], p), p)
    return result


def stacked_slice_product(
    u: npt.NDArray[np.int64], v: npt.NDArray[np.int64], k: int, p: int
) -> npt.NDArray[np.int64]:
    """Degree-k coefficient of ``U V^T`` for slice stacks ``(h, a, b)`` and ``(h, c, b)``, as one field product."""
    a, b = u.shape[1], u.shape[2]
    c = v.shape[1]
    if b == 0:
        return np.zeros((a, c), dtype=np.int64)
    left = u[: k + 1].transpose(1, 0, 2).reshape(a, (k + 1) * b)
    right = v[k::-1].transpose(1, 0, 2).reshape(c, (k + 1) * b)
    return matmul_mod(left, right.T, p)


class PolyMatrix:
    """Matrix over F[X]/<X^h>."""

    slices: npt.NDArray[np.int64]
    field: FieldConfig

    def __init__(self, slices, field: FieldConfig):
        """Create a polynomial matrix.

        Args:
            slices (array-like): Coefficient stack of shape ``(h, rows, cols)``, reduced modulo p on construction.
            field (FieldConfig): The coefficient field.
        """
        self.slices = np.asarray(slices, dtype=np.int64) % field.p
        if self.slices.ndim != 3 or self.slices.shape[0] == 0:
            raise ShapeMismatch(f"Expected a (h, rows, cols) stack, got shape {self.slices.shape}")
        self.field = field

    @staticmethod
    def identity(n: int, h: int, field: FieldConfig) -> "PolyMatrix":
        """The n x n identity."""
        slices = np.zeros((h, n, n), dtype=np.int64)
        slices[0] = np.eye(n, dtype=np.int64)
        return PolyMatrix(slices, field)

    @staticmethod
    def zeros(h: int, rows: int, cols: int, field: FieldConfig) -> "PolyMatrix":
        """The zero matrix."""
        return PolyMatrix(np.zeros((h, rows, cols), dtype=np.int64), field)

    @staticmethod
    def from_entries(entries: Sequence[Sequence[TruncPoly]], field: FieldConfig) -> "PolyMatrix":
        """Assemble a matrix from rows of polynomials sharing one degree bound."""
        stack = np.array([[poly.coeffs for poly in row] for row in entries], dtype=np.int64)
        return PolyMatrix(stack.transpose(2, 0, 1), field)

    @property
    def h(self) -> int:
        """Degree bound."""
        return self.slices.shape[0]

    @property
    def rows(self) -> int:
        """Number of rows."""
        return self.slices.shape[1]

    @property
    def cols(self) -> int:
        """Number of columns."""
        return self.slices.shape[2]

    def entry(self, i: int, j: int) -> TruncPoly:
        """Entry ``(i, j)`` as a polynomial."""
        return TruncPoly(self.slices[:, i, j], self.field)

    def transpose(self) -> "PolyMatrix":
        """Transposed matrix."""
        return PolyMatrix(self.slices.transpose(0, 2, 1), self.field)

    def copy(self) -> "PolyMatrix":
        """Deep copy."""
        return PolyMatrix(self.slices.copy(), self.field)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        """Entrywise sum."""
        _check_same_shape(self, other)
        return PolyMatrix(addmod(self.slices, other.slices, self.field.p), self.field)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        """Entrywise difference."""
        _check_same_shape(self, other)
        return PolyMatrix(submod(self.slices, other.slices, self.field.p), self.field)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        """See :func:`polymat_mul`."""
        return polymat_mul(self, other)

    def __eq__(self, other) -> bool:
        """Matrices are equal when field and every coefficient agree."""
        return (
            isinstance(other, PolyMatrix)
            and other.field == self.field
            and bool(np.array_equal(other.slices, self.slices))
        )

    def __repr__(self) -> str:
        """Get a string representation of the matrix."""
        return f"PolyMatrix({self.rows}x{self.cols} mod X^{self.h}, p={self.field.p})"


def _check_same_shape(a: PolyMatrix, b: PolyMatrix):
    if a.h != b.h:
        raise DegreeMismatch(f"Degree bounds differ: {a.h} and {b.h}")
    if a.slices.shape != b.slices.shape:
        raise ShapeMismatch(f"Shapes differ: {a.slices.shape[1:]} and {b.slices.shape[1:]}")


def polymat_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Product of two polynomial matrices, truncated at X^h.

    Raises:
        ShapeMismatch: If ``a.cols != b.rows``.
        DegreeMismatch: If the degree bounds differ.
    """
    if a.cols != b.rows:
        raise ShapeMismatch(f"Cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    if a.h != b.h:
        raise DegreeMismatch(f"Degree bounds differ: {a.h} and {b.h}")
    return PolyMatrix(poly_matmul(a.slices, b.slices, a.field.p), a.field)


def neumann_inverse(m: PolyMatrix) -> PolyMatrix:
    """Invert ``M = I - N`` with ``N`` divisible by X, as the product of ``(I + N^(2^j))`` over ``ceil(log2 h)`` rounds.

    Args:
        m (PolyMatrix): Square matrix whose constant coefficient is the identity.

    Raises:
        ShapeMismatch: If ``m`` is not square.
        BadForm: If the constant coefficient is not the identity.

    Returns:
        PolyMatrix: ``M^-1`` modulo X^h.
    """
    if m.rows != m.cols:
        raise ShapeMismatch(f"Cannot invert a {m.rows}x{m.cols} matrix")
    n, p = m.rows, m.field.p
    identity = np.eye(n, dtype=np.int64)
    if not np.array_equal(m.slices[0], identity):
        raise BadForm("Constant coefficient is not the identity")

    power = (-m.slices) % p
    power[0] = 0
    result = power.copy()
    result[0] = identity
    covered = 2
    while covered < m.h:
        power = poly_matmul(power, power, p)
        if not power.any():
            break
        factor = power.copy()
        factor[0] = identity
        result = poly_matmul(result, factor, p)
        covered *= 2
    return PolyMatrix(result, m.field)


def coeff_slice_product(u: PolyMatrix, v: PolyMatrix, k: int) -> FMatrix:
    """Degree-k coefficient of ``U V^T`` without forming the full product.

    Args:
        u (PolyMatrix): ``a x b`` matrix.
        v (PolyMatrix): ``c x b`` matrix.
        k (int): Degree, ``0 <= k < h``.

    Raises:
        ShapeMismatch: If the inner dimensions disagree.
        DegreeMismatch: If the degree bounds differ.
        IndexOutOfRange: If ``k`` is not below h.

    Returns:
        FMatrix: The ``a x c`` coefficient matrix.
    """
    if u.cols != v.cols:
        raise ShapeMismatch(f"Inner dimensions differ: {u.cols} and {v.cols}")
    if u.h != v.h:
        raise DegreeMismatch(f"Degree bounds differ: {u.h} and {v.h}")
    if not 0 <= k < u.h:
        raise IndexOutOfRange(f"Degree {k} outside [0, {u.h})")
    return stacked_slice_product(u.slices, v.slices, k, u.field.p)


def submatrix(a: PolyMatrix | FMatrix, rows: IndexSet, cols: IndexSet) -> PolyMatrix | FMatrix:
    """Restrict a matrix to sorted, duplicate-free row and column index sets.

    Raises:
        IndexOutOfRange: If an index set is invalid.
    """
    if isinstance(a, PolyMatrix):
        r = check_index_set(rows, a.rows)
        c = check_index_set(cols, a.cols)
        return PolyMatrix(a.slices[:, r][:, :, c], a.field)
    r = check_index_set(rows, a.shape[0])
    c = check_index_set(cols, a.shape[1])
    return a[np.ix_(r, c)]

"""Dynamic inverses of polynomial matrices under element updates.

Three layers:

* :class:`ExactInverseDS` answers exact row and column queries of ``M^-1`` by keeping the inverse at the last reset
  plus a list of Sherman-Morrison correction pairs, re-inverting after ``nu_cap`` updates.
* :class:`SliceInverseDS` answers submatrix queries of single coefficient slices ``(M^-1)^[d]`` for ``d`` in a fixed
  set ``S``, asking the exact structure for each correction pair.
* :class:`WorstCaseWrapper` runs two phase-shifted slice structures so that the reset work is spread evenly over
  the updates.

Every update adds ``delta`` to one entry ``M[i, j]``; ``delta`` must have zero constant term.
"""

from collections import deque
from copy import deepcopy
from math import ceil
from typing import Deque, Dict, Final, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .errors import BadForm, ConfigError, ConstantTermUpdate, DegreeMismatch, DegreeNotTracked, SingularPivot
from .ff_poly import FieldConfig, TruncPoly, addmod, poly_inv_unit, submod
from .logging import log
from .polymatrix import (
    PolyMatrix,
    check_index_set,
    neumann_inverse,
    poly_matmul,
    poly_scale,
    stacked_slice_product,
)
from .types import FMatrix, IndexSet, LogLevel


CorrectionPair = Tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]


def _empty_corrections(h: int, n: int, capacity: int) -> npt.NDArray[np.int64]:
    return np.zeros((h, n, capacity), dtype=np.int64)


class ExactInverseDS:
    """Exact dynamic inverse supporting row and column queries.

    The current inverse is ``base_inverse - U V^T`` where column ``k`` of ``U`` and ``V`` holds the ``k``-th correction
    pair since the last reset.
    """

    field: Final[FieldConfig]
    n: Final[int]
    h: Final[int]
    nu_cap: Final[int]
    auto_reset: bool
    matrix: npt.NDArray[np.int64]
    base_inverse: npt.NDArray[np.int64]
    u_hat: npt.NDArray[np.int64]
    v_hat: npt.NDArray[np.int64]
    t: int
    resets: int
    _rebuild: Optional[npt.NDArray[np.int64]]

    def __init__(self, m: PolyMatrix, nu_cap: int, auto_reset: bool = True):
        """Invert ``m`` and prepare for updates.

        Args:
            m (PolyMatrix): Square matrix with identity constant coefficient.
            nu_cap (int): Number of updates between two full re-inversions.
            auto_reset (bool, optional): Re-invert automatically when ``nu_cap`` is reached. Defaults to True.

        Raises:
            BadForm: If the constant coefficient of ``m`` is not the identity.
            ConfigError: If ``nu_cap`` is below 1.
        """
        if nu_cap < 1:
            raise ConfigError(f"nu_cap must be at least 1, got {nu_cap}")
        self.field = m.field
        self.n = m.rows
        self.h = m.h
        self.nu_cap = nu_cap
        self.auto_reset = auto_reset
        self.base_inverse = neumann_inverse(m).slices
        self.matrix = m.slices.copy()
        self.u_hat = _empty_corrections(self.h, self.n, nu_cap)
        self.v_hat = _empty_corrections(self.h, self.n, nu_cap)
        self.t = 0
        self.resets = 0
        self._rebuild = None

    def _corrections(self, rows: slice | npt.NDArray[np.int64], cols: slice | npt.NDArray[np.int64]):
        u = self.u_hat[:, rows, : self.t]
        v = self.v_hat[:, cols, : self.t]
        return poly_matmul(u, v.transpose(0, 2, 1), self.field.p)

    def query_rows(self, rows: IndexSet) -> npt.NDArray[np.int64]:
        """Rows of the current inverse as a slice stack of shape ``(h, len(rows), n)``."""
        index = check_index_set(rows, self.n)
        block = self.base_inverse[:, index, :]
        if self.t == 0:
            return block.copy()
        return submod(block, self._corrections(index, slice(None)), self.field.p)

    def query_row(self, i: int) -> PolyMatrix:
        """Row ``i`` of the current inverse as a ``1 x n`` matrix.

        Raises:
            IndexOutOfRange: If ``i`` is not a node index.
        """
        return PolyMatrix(self.query_rows([i]), self.field)

    def query_col(self, j: int) -> PolyMatrix:
        """Column ``j`` of the current inverse as an ``n x 1`` matrix.

        Raises:
            IndexOutOfRange: If ``j`` is not a node index.
        """
        index = check_index_set([j], self.n)
        block = self.base_inverse[:, :, index]
        if self.t:
            block = submod(block, self._corrections(slice(None), index), self.field.p)
        return PolyMatrix(block, self.field)

    def inverse(self) -> PolyMatrix:
        """The full current inverse."""
        return PolyMatrix(self.query_rows(np.arange(self.n)), self.field)

    def _check_delta(self, delta: TruncPoly):
        if delta.h != self.h:
            raise DegreeMismatch(f"Update truncated at {delta.h}, structure at {self.h}")
        if delta.constant != 0:
            raise ConstantTermUpdate(f"Update {delta} has nonzero constant term")

    def correction_pair(self, i: int, j: int, delta: TruncPoly) -> CorrectionPair:
        """Sherman-Morrison pair for adding ``delta`` to ``M[i, j]``.

        With ``u = e_i`` and ``v = delta * e_j`` the pair is ``u_hat = M^-1 e_i`` and
        ``v_hat = (1 + v^T u_hat)^-1 * (v^T M^-1)``, so that the new inverse is ``M^-1 - u_hat v_hat^T``.

        Raises:
            ConstantTermUpdate: If ``delta`` has a nonzero constant term.
            SingularPivot: If the denominator is not a unit.

        Returns:
            (np.ndarray, np.ndarray): ``u_hat`` and ``v_hat`` as ``(h, n)`` coefficient arrays.
        """
        self._check_delta(delta)
        u_hat = self.query_col(i).slices[:, :, 0]
        row = self.query_row(j).slices[:, 0, :]
        pivot = TruncPoly.one(self.h, self.field) + delta * TruncPoly(row[:, i], self.field)
        if pivot.constant != 1:
            raise SingularPivot(f"Denominator {pivot} does not have constant term 1")
        scale = poly_inv_unit(pivot) * delta
        v_hat = poly_scale(scale.coeffs, row, self.field.p)
        if v_hat[0].any():
            raise BadForm("Correction column has nonzero constant term")
        return u_hat, v_hat

    def _grow(self):
        extra = _empty_corrections(self.h, self.n, max(1, self.u_hat.shape[2]))
        self.u_hat = np.concatenate((self.u_hat, extra), axis=2)
        self.v_hat = np.concatenate((self.v_hat, extra.copy()), axis=2)

    def update(self, i: int, j: int, delta: TruncPoly, pair: Optional[CorrectionPair] = None):
        """Add ``delta`` to ``M[i, j]``.

        Args:
            i (int): Row.
            j (int): Column.
            delta (TruncPoly): Change, with zero constant term.
            pair (CorrectionPair, optional): Precomputed :meth:`correction_pair` for this exact update.
                Defaults to None.
        """
        check_index_set([i], self.n)
        check_index_set([j], self.n)
        u_hat, v_hat = self.correction_pair(i, j, delta) if pair is None else pair
        if self.t >= self.u_hat.shape[2]:
            self._grow()
        self.u_hat[:, :, self.t] = u_hat
        self.v_hat[:, :, self.t] = v_hat
        self.t += 1
        self.matrix[:, i, j] = addmod(self.matrix[:, i, j], delta.coeffs, self.field.p)
        if self.auto_reset and self.t >= self.nu_cap:
            self.reset()

    def _clear(self):
        self.u_hat[:] = 0
        self.v_hat[:] = 0
        self.t = 0
        self.resets += 1

    def reset(self):
        """Re-invert the accumulated matrix and drop all corrections."""
        log(f"Exact inverse reset after {self.t} updates", LogLevel.verbose)
        self.base_inverse = neumann_inverse(PolyMatrix(self.matrix, self.field)).slices
        self._clear()

    def begin_rebuild(self):
        """Start a chunked reset; no update may arrive until :meth:`finish_rebuild`."""
        self._rebuild = np.zeros_like(self.base_inverse)

    def rebuild_rows(self, rows: IndexSet):
        """Materialise some rows of the current inverse into the pending base."""
        if self._rebuild is None:
            raise RuntimeError("No rebuild in progress")
        index = check_index_set(rows, self.n)
        self._rebuild[:, index, :] = self.query_rows(index)

    def finish_rebuild(self):
        """Install the rebuilt base and drop all corrections."""
        if self._rebuild is None:
            raise RuntimeError("No rebuild in progress")
        self.base_inverse = self._rebuild
        self._rebuild = None
        self._clear()


class SliceInverseDS:
    """Dynamic inverse answering submatrix queries to the coefficient slices ``d`` in ``S``."""

    exact: ExactInverseDS
    degrees: Final[List[int]]
    mu_cap: Final[int]
    auto_reset: bool
    base_slices: npt.NDArray[np.int64]
    u_hat: npt.NDArray[np.int64]
    v_hat: npt.NDArray[np.int64]
    t: int
    resets: int
    _position: Dict[int, int]

    def __init__(
        self,
        m: PolyMatrix,
        degrees: Sequence[int],
        mu_cap: int,
        nu_cap: Optional[int] = None,
        auto_reset: bool = True,
    ):
        """Create the structure.

        Args:
            m (PolyMatrix): Square matrix with identity constant coefficient.
            degrees (Sequence[int]): Tracked degrees, each below h. May be empty.
            mu_cap (int): Number of updates between two resets of the tracked slices.
            nu_cap (int, optional): Reset period of the inner exact structure. Defaults to ``mu_cap``.
            auto_reset (bool, optional): Reset automatically at the caps. Defaults to True.

        Raises:
            BadForm: If the constant coefficient of ``m`` is not the identity.
            IndexOutOfRange: If a degree is not below h.
        """
        if mu_cap < 1:
            raise ConfigError(f"mu_cap must be at least 1, got {mu_cap}")
        self.degrees = check_index_set(sorted(set(int(d) for d in degrees)), m.h).tolist()
        self._position = {d: k for k, d in enumerate(self.degrees)}
        self.exact = ExactInverseDS(m, mu_cap if nu_cap is None else nu_cap, auto_reset=auto_reset)
        self.mu_cap = mu_cap
        self.auto_reset = auto_reset
        self.base_slices = self.exact.base_inverse[self.degrees].copy()
        self.u_hat = _empty_corrections(m.h, m.rows, mu_cap)
        self.v_hat = _empty_corrections(m.h, m.rows, mu_cap)
        self.t = 0
        self.resets = 0

    @property
    def n(self) -> int:
        """Matrix dimension."""
        return self.exact.n

    @property
    def h(self) -> int:
        """Degree bound."""
        return self.exact.h

    @property
    def field(self) -> FieldConfig:
        """Coefficient field."""
        return self.exact.field

    def update(self, i: int, j: int, delta: TruncPoly):
        """Add ``delta`` to ``M[i, j]``.

        Raises:
            ConstantTermUpdate: If ``delta`` has a nonzero constant term.
            IndexOutOfRange: If ``i`` or ``j`` is not a node index.
        """
        check_index_set([i], self.n)
        check_index_set([j], self.n)
        pair = self.exact.correction_pair(i, j, delta)
        if self.t >= self.u_hat.shape[2]:
            extra = _empty_corrections(self.h, self.n, max(1, self.u_hat.shape[2]))
            self.u_hat = np.concatenate((self.u_hat, extra), axis=2)
            self.v_hat = np.concatenate((self.v_hat, extra.copy()), axis=2)
        self.u_hat[:, :, self.t], self.v_hat[:, :, self.t] = pair
        self.t += 1
        self.exact.update(i, j, delta, pair=pair)
        if self.auto_reset and self.t >= self.mu_cap:
            self.reset()

    def query(self, rows: IndexSet, cols: IndexSet, d: int) -> FMatrix:
        """Submatrix ``(M^-1)^[d]`` restricted to ``rows x cols``.

        Raises:
            DegreeNotTracked: If ``d`` is not in the tracked set.
            IndexOutOfRange: If an index set is invalid.
        """
        if d not in self._position:
            raise DegreeNotTracked(f"Degree {d} is not tracked")
        r = check_index_set(rows, self.n)
        c = check_index_set(cols, self.n)
        block = self.base_slices[self._position[d]][np.ix_(r, c)]
        if self.t == 0:
            return block.copy()
        correction = stacked_slice_product(self.u_hat[:, r, : self.t], self.v_hat[:, c, : self.t], d, self.field.p)
        return submod(block, correction, self.field.p)

    def _clear(self):
        self.u_hat[:] = 0
        self.v_hat[:] = 0
        self.t = 0
        self.resets += 1

    def reset(self):
        """Recompute the tracked slices in full and drop the corrections; the exact structure is left alone."""
        log(f"Slice reset after {self.t} updates", LogLevel.verbose)
        everything = np.arange(self.n)
        self.base_slices = np.array(
            [self.query(everything, everything, d) for d in self.degrees], dtype=np.int64
        ).reshape(self.base_slices.shape)
        self._clear()

    def begin_reset(self):
        """Start a chunked reset of this structure and its exact structure together."""
        self.exact.begin_rebuild()

    def reset_rows(self, rows: IndexSet):
        """Compute one chunk of rows of the full current inverse."""
        self.exact.rebuild_rows(rows)

    def finish_reset(self):
        """Install the rebuilt inverse in both structures."""
        self.exact.finish_rebuild()
        self.base_slices = self.exact.base_inverse[self.degrees].copy()
        self._clear()


class WorstCaseWrapper:
    """Two phase-shifted copies of :class:`SliceInverseDS` with the reset spread over the updates.

    Each copy cycles through ``4q`` updates, ``q = ceil(mu_cap / 4)``:

    1. ``[0, q)``: frozen; incoming updates are queued while one chunk of rows of the full inverse is rebuilt per
       update.
    2. ``[q, 2q)``: the new update is queued and two queued updates are applied.
    3. ``[2q, 4q)``: updates are applied immediately and the copy answers queries.

    The second copy runs ``2q`` updates ahead, so exactly one copy is in its third phase at any time.
    """

    copies: Final[List[SliceInverseDS]]
    quarter: Final[int]
    period: Final[int]
    offsets: Final[List[int]]
    pending: Final[List[Deque[Tuple[int, int, TruncPoly]]]]
    received: int
    _chunks: List[List[npt.NDArray[np.int64]]]

    def __init__(self, m: PolyMatrix, degrees: Sequence[int], mu_cap: int, nu_cap: Optional[int] = None):
        """Create both copies.

        Args:
            m (PolyMatrix): Square matrix with identity constant coefficient.
            degrees (Sequence[int]): Tracked degrees.
            mu_cap (int): Reset period of a single structure.
            nu_cap (int, optional): Unused beyond validation; both inner structures reset with the wrapper's period.
                Defaults to None.
        """
        if mu_cap < 1 or (nu_cap is not None and nu_cap < 1):
            raise ConfigError("Reset periods must be at least 1")
        self.quarter = ceil(mu_cap / 4)
        self.period = 4 * self.quarter
        first = SliceInverseDS(m, degrees, self.period, nu_cap=self.period, auto_reset=False)
        self.copies = [first, deepcopy(first)]
        self.offsets = [0, 2 * self.quarter]
        self.pending = [deque(), deque()]
        self.received = 0
        self._chunks = [[], []]

    @property
    def n(self) -> int:
        """Matrix dimension."""
        return self.copies[0].n

    @property
    def h(self) -> int:
        """Degree bound."""
        return self.copies[0].h

    @property
    def degrees(self) -> List[int]:
        """Tracked degrees."""
        return self.copies[0].degrees

    @property
    def resets(self) -> int:
        """Completed resets over both copies."""
        return sum(copy.resets for copy in self.copies)

    def position(self, copy: int) -> int:
        """Where copy ``copy`` is in its life-cycle."""
        return (self.received + self.offsets[copy]) % self.period

    @property
    def available(self) -> SliceInverseDS:
        """The copy currently answering queries."""
        for index, copy in enumerate(self.copies):
            if self.position(index) >= 2 * self.quarter:
                return copy
        raise RuntimeError("No copy available")

    def update(self, i: int, j: int, delta: TruncPoly):
        """Add ``delta`` to ``M[i, j]`` in both copies, advancing their life-cycles by one step.

        Raises:
            ConstantTermUpdate: If ``delta`` has a nonzero constant term.
            IndexOutOfRange: If ``i`` or ``j`` is not a node index.
        """
        check_index_set([i], self.n)
        check_index_set([j], self.n)
        if delta.h != self.h:
            raise DegreeMismatch(f"Update truncated at {delta.h}, structure at {self.h}")
        if delta.constant != 0:
            raise ConstantTermUpdate(f"Update {delta} has nonzero constant term")

        for index, copy in enumerate(self.copies):
            position = self.position(index)
            queue = self.pending[index]
            if position < self.quarter:
                if position == 0:
                    copy.begin_reset()
                    self._chunks[index] = np.array_split(np.arange(self.n), self.quarter)
                copy.reset_rows(self._chunks[index][position])
                queue.append((i, j, delta))
                if position == self.quarter - 1:
                    copy.finish_reset()
                    log(f"Copy {index} reset, {len(queue)} updates queued", LogLevel.verbose)
            elif position < 2 * self.quarter:
                queue.append((i, j, delta))
                for _ in range(2):
                    if queue:
                        copy.update(*queue.popleft())
            else:
                copy.update(i, j, delta)
        self.received += 1

    def query(self, rows: IndexSet, cols: IndexSet, d: int) -> FMatrix:
        """See :meth:`SliceInverseDS.query`; answered by the available copy."""
        return self.available.query(rows, cols, d)

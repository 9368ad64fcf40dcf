"""Precision-aware linear algebra over K.

Elimination works on sparse row dictionaries with full pivoting.  Each column is measured
against its own norm (the smallest valuation among its original entries): an entry is
*negligible* once its valuation reaches that norm plus the working precision, and negligible
entries are treated as zero.  An entry that cancels to an inexact zero known to less than
that threshold is also treated as zero, but the decision is flagged unreliable.
"""

import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from tate_derham.algebra.scalars import EXACT, LaurentScalar
from tate_derham.models import RankReport

logger = logging.getLogger(__name__)

Vector = tuple[LaurentScalar, ...]


@dataclass(frozen=True, slots=True)
class ScalarMatrix:
    """A dense matrix of scalars.

    Args:
        rows: The number of rows.
        cols: The number of columns.
        entries: The entries, row by row.
        precision_floor: The relative precision every entry is known to.
    """

    rows: int
    cols: int
    entries: tuple[tuple[LaurentScalar, ...], ...]
    precision_floor: int

    @classmethod
    def from_sparse(
        cls, rows: int, cols: int, values: Mapping[tuple[int, int], LaurentScalar], precision_floor: int
    ) -> "ScalarMatrix":
        zero = LaurentScalar.zero()
        dense = [[zero] * cols for _ in range(rows)]
        for (i, j), value in values.items():
            dense[i][j] = value
        return cls(rows, cols, tuple(tuple(row) for row in dense), precision_floor)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Sequence[LaurentScalar]], precision_floor: int):
        values = {(i, j): column[i] for j, column in enumerate(columns) for i in range(rows)}
        return cls.from_sparse(rows, len(columns), values, precision_floor)

    @classmethod
    def identity(cls, size: int, precision: int) -> "ScalarMatrix":
        one = LaurentScalar.one(precision)
        return cls.from_sparse(size, size, {(i, i): one for i in range(size)}, precision)

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def sparse(self) -> dict[tuple[int, int], LaurentScalar]:
        return {
            (i, j): value
            for i, row in enumerate(self.entries)
            for j, value in enumerate(row)
            if not value.is_exact_zero
        }

    def hstack(self, other: "ScalarMatrix") -> "ScalarMatrix":
        if self.rows != other.rows:
            raise ValueError(f"row counts differ: {self.rows} != {other.rows}")
        entries = tuple(a + b for a, b in zip(self.entries, other.entries))
        floor = min(self.precision_floor, other.precision_floor)
        return ScalarMatrix(self.rows, self.cols + other.cols, entries, floor)

    def __matmul__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shapes do not compose: {self.cols} != {other.rows}")
        left = self.sparse()
        right_rows: dict[int, list[tuple[int, LaurentScalar]]] = {}
        for (k, j), value in other.sparse().items():
            right_rows.setdefault(k, []).append((j, value))
        values: dict[tuple[int, int], LaurentScalar] = {}
        for (i, k), a in left.items():
            for j, b in right_rows.get(k, ()):
                values[(i, j)] = values.get((i, j), LaurentScalar.zero()) + a * b
        return ScalarMatrix.from_sparse(
            self.rows, other.cols, values, min(self.precision_floor, other.precision_floor)
        )

    def __sub__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        entries = tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries))
        return ScalarMatrix(self.rows, self.cols, entries, min(self.precision_floor, other.precision_floor))

    def apply(self, vector: Sequence[LaurentScalar]) -> Vector:
        out = []
        for row in self.entries:
            acc = LaurentScalar.zero()
            for a, b in zip(row, vector):
                if not a.is_exact_zero and not b.is_exact_zero:
                    acc = acc + a * b
            out.append(acc)
        return tuple(out)


@dataclass
class _Elimination:
    rows: list[dict[int, LaurentScalar]]
    pivots: list[tuple[int, int]]
    reliable: bool
    thresholds: list[int]


def _column_thresholds(m: ScalarMatrix) -> list[int]:
    norms = [EXACT] * m.cols
    for row in m.entries:
        for j, value in enumerate(row):
            if not value.is_zero and value.valuation < norms[j]:
                norms[j] = value.valuation
    return [EXACT if v >= EXACT else v + m.precision_floor for v in norms]


def _eliminate(m: ScalarMatrix) -> _Elimination:
    thresholds = _column_thresholds(m)
    reliable = True
    rows: list[dict[int, LaurentScalar]] = []
    for row in m.entries:
        kept = {}
        for j, value in enumerate(row):
            if value.is_zero:
                if not value.is_exact_zero and value.valuation < thresholds[j] < EXACT:
                    reliable = False
                continue
            if value.valuation < thresholds[j]:
                kept[j] = value
        rows.append(kept)

    pivots: list[tuple[int, int]] = []
    pivot_rows: set[int] = set()
    pivot_cols: set[int] = set()
    while True:
        best: Optional[tuple[int, int, int]] = None
        for i, row in enumerate(rows):
            if i in pivot_rows:
                continue
            for j, value in row.items():
                if j in pivot_cols:
                    continue
                key = (value.valuation - (thresholds[j] - m.precision_floor), i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, r, c = best
        pivot = rows[r][c]
        inverse = pivot.inverse()
        for i, row in enumerate(rows):
            if i == r or c not in row:
                continue
            factor = row[c] * inverse
            for j, value in rows[r].items():
                updated = row.get(j, LaurentScalar.zero()) - factor * value
                if j == c or updated.is_zero:
                    if updated.is_zero and not updated.is_exact_zero and j != c and updated.valuation < thresholds[j]:
                        reliable = False
                    row.pop(j, None)
                elif updated.valuation >= thresholds[j]:
                    row.pop(j, None)
                else:
                    row[j] = updated
        pivots.append((r, c))
        pivot_rows.add(r)
        pivot_cols.add(c)
    return _Elimination(rows, pivots, reliable, thresholds)


def _report(m: ScalarMatrix, elimination: _Elimination) -> RankReport:
    rank = len(elimination.pivots)
    worst = max((elimination.rows[r][c].valuation for r, c in elimination.pivots), default=None)
    if not elimination.reliable:
        logger.warning("rank %d of a %dx%d matrix rests on digits beyond the precision", rank, m.rows, m.cols)
    return RankReport(
        rows=m.rows,
        cols=m.cols,
        rank=rank,
        kernel_dim=m.cols - rank,
        cokernel_dim=m.rows - rank,
        min_pivot_valuation=worst,
        reliable=elimination.reliable,
    )


def echelonize(m: ScalarMatrix) -> tuple[ScalarMatrix, RankReport]:
    """Reduced row-echelon form by full valuation pivoting.

    Each step takes, among the remaining rows and columns, the entry minimizing
    ``(valuation - column norm, row, column)``: the largest entry relative to its column, ties
    going to the lowest row and then the lowest column.  Pivot rows come first, in the order the
    pivots were chosen; the remaining rows are zero.

    Args:
        m: The matrix to reduce.

    Returns:
        The reduced matrix and its rank report.
    """
    elimination = _eliminate(m)
    order = [r for r, _ in elimination.pivots]
    order += [i for i in range(m.rows) if i not in set(order)]
    values = {}
    for new_i, old_i in enumerate(order):
        for j, value in elimination.rows[old_i].items():
            values[(new_i, j)] = value
    report = _report(m, elimination)
    logger.debug("echelonized %dx%d matrix: rank %d", m.rows, m.cols, report.rank)
    return ScalarMatrix.from_sparse(m.rows, m.cols, values, m.precision_floor), report


def rank_report(m: ScalarMatrix) -> RankReport:
    return _report(m, _eliminate(m))


def kernel_basis(m: ScalarMatrix) -> list[Vector]:
    """A basis of the kernel at the working precision, each vector scaled to Gauss norm one."""
    elimination = _eliminate(m)
    pivot_cols = {c for _, c in elimination.pivots}
    basis = []
    for free in range(m.cols):
        if free in pivot_cols:
            continue
        vector = [LaurentScalar.zero()] * m.cols
        vector[free] = LaurentScalar.one(m.precision_floor)
        for r, c in elimination.pivots:
            row = elimination.rows[r]
            if free in row:
                vector[c] = -(row[free] / row[c])
        shift = min(v.valuation for v in vector if not v.is_zero)
        basis.append(tuple(v.shift(-shift) for v in vector))
    return basis


def cokernel_dim(m: ScalarMatrix) -> tuple[int, RankReport]:
    report = rank_report(m)
    return report.cokernel_dim, report


def relative_rank(big: ScalarMatrix, vectors: Sequence[Vector]) -> tuple[int, RankReport]:
    """The dimension of the span of ``vectors`` modulo the column space of ``big``.

    Returns:
        The dimension, and the rank report of the augmented matrix ``[big | vectors]``.
    """
    base = rank_report(big)
    if not vectors:
        return 0, base
    augmented = big.hstack(ScalarMatrix.from_columns(big.rows, vectors, big.precision_floor))
    report = rank_report(augmented)
    report.reliable = report.reliable and base.reliable
    return report.rank - base.rank, report

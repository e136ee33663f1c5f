"""
Exact linear algebra over Q_p: valuation-pivoted elimination, |det|_p, inversion.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from padic_regress.services.padic import (
    PAdicError,
    PAdicNumber,
    PrecisionPolicy,
    PrimeMismatchError,
    from_integer,
    sum_values,
)

logger = logging.getLogger(__name__)


class SingularMatrixError(PAdicError):
    """Raised when a pivot column is indistinguishable from zero at working precision."""

    def __init__(self, column: int) -> None:
        super().__init__(f"matrix is singular at working precision (pivot column {column})")
        self.column = column


class DimensionMismatchError(PAdicError, ValueError):
    """Raised when matrix/vector shapes do not fit the operation."""


@dataclass(frozen=True, slots=True)
class PAdicMatrix:
    """Row-major matrix of values sharing one prime."""

    prime: int
    rows: int
    cols: int
    entries: tuple[PAdicNumber, ...]

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise DimensionMismatchError(f"matrix dimensions must be positive: {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatchError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        for entry in self.entries:
            if entry.prime != self.prime:
                raise PrimeMismatchError(f"entry over Q_{entry.prime} in a Q_{self.prime} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[PAdicNumber]]) -> PAdicMatrix:
        if not rows or not rows[0]:
            raise DimensionMismatchError("matrix needs at least one row and column")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise DimensionMismatchError("ragged rows")
        return cls(rows[0][0].prime, len(rows), width, tuple(e for row in rows for e in row))

    @classmethod
    def from_integers(
        cls, rows: Sequence[Sequence[int]], prime: int, policy: PrecisionPolicy | None = None
    ) -> PAdicMatrix:
        return cls.from_rows([[from_integer(v, prime, policy) for v in row] for row in rows])

    @classmethod
    def identity(cls, size: int, prime: int, policy: PrecisionPolicy | None = None) -> PAdicMatrix:
        return cls.from_integers(
            [[1 if i == j else 0 for j in range(size)] for i in range(size)], prime, policy
        )

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: tuple[int, int]) -> PAdicNumber:
        row, col = index
        return self.entries[row * self.cols + col]

    def row(self, index: int) -> tuple[PAdicNumber, ...]:
        start = index * self.cols
        return self.entries[start : start + self.cols]

    def column(self, index: int) -> tuple[PAdicNumber, ...]:
        return self.entries[index :: self.cols]

    def to_rows(self) -> list[list[PAdicNumber]]:
        return [list(self.row(i)) for i in range(self.rows)]


def matvec(matrix: PAdicMatrix, vector: Sequence[PAdicNumber]) -> tuple[PAdicNumber, ...]:
    if len(vector) != matrix.cols:
        raise DimensionMismatchError(f"vector of length {len(vector)} for {matrix.cols} columns")
    return tuple(
        sum_values([a * x for a, x in zip(matrix.row(i), vector)], matrix.prime)
        for i in range(matrix.rows)
    )


def matmul(left: PAdicMatrix, right: PAdicMatrix) -> PAdicMatrix:
    if left.cols != right.rows:
        raise DimensionMismatchError(f"cannot multiply {left.rows}x{left.cols} by {right.rows}x{right.cols}")
    rows = [
        [
            sum_values([a * b for a, b in zip(left.row(i), right.column(j))], left.prime)
            for j in range(right.cols)
        ]
        for i in range(left.rows)
    ]
    return PAdicMatrix.from_rows(rows)


def _forward_eliminate(
    matrix: PAdicMatrix, rhs: Sequence[Sequence[PAdicNumber]]
) -> tuple[list[list[PAdicNumber]], list[PAdicNumber]]:
    """
    Reduce [matrix | rhs columns] to upper-triangular form.

    The pivot of each column is its minimum-valuation entry at or below the
    diagonal, ties going to the lowest row index.
    """
    if not matrix.is_square:
        raise DimensionMismatchError(f"square matrix required, got {matrix.rows}x{matrix.cols}")
    size = matrix.rows
    for column in rhs:
        if len(column) != size:
            raise DimensionMismatchError(f"right-hand side of length {len(column)} for size {size}")

    work = [list(matrix.row(i)) + [column[i] for column in rhs] for i in range(size)]
    width = len(work[0])
    zero = PAdicNumber.zero(matrix.prime)
    pivots: list[PAdicNumber] = []

    for col in range(size):
        pivot_row = min(range(col, size), key=lambda r: (work[r][col].valuation, r))
        pivot = work[pivot_row][col]
        if pivot.is_zero:
            raise SingularMatrixError(col)
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
        logger.debug("column %d pivot row %d valuation %s", col, pivot_row, pivot.valuation)
        pivots.append(pivot)

        for r in range(col + 1, size):
            entry = work[r][col]
            if entry.is_exact_zero:
                continue
            factor = entry / pivot
            for c in range(col + 1, width):
                work[r][c] = work[r][c] - factor * work[col][c]
            work[r][col] = zero
    return work, pivots


def _back_substitute(work: list[list[PAdicNumber]], rhs_index: int) -> tuple[PAdicNumber, ...]:
    size = len(work)
    solution: list[PAdicNumber] = [PAdicNumber.zero(work[0][0].prime)] * size
    for i in reversed(range(size)):
        total = work[i][size + rhs_index]
        for j in range(i + 1, size):
            total = total - work[i][j] * solution[j]
        solution[i] = total / work[i][i]
    return tuple(solution)


def solve_linear(matrix: PAdicMatrix, rhs: Sequence[PAdicNumber]) -> tuple[PAdicNumber, ...]:
    """Solve matrix * w = rhs."""
    work, _ = _forward_eliminate(matrix, [rhs])
    return _back_substitute(work, 0)


def inverse(matrix: PAdicMatrix, policy: PrecisionPolicy | None = None) -> PAdicMatrix:
    identity = PAdicMatrix.identity(matrix.rows, matrix.prime, policy)
    work, _ = _forward_eliminate(matrix, [identity.column(j) for j in range(matrix.rows)])
    columns = [_back_substitute(work, j) for j in range(matrix.rows)]
    return PAdicMatrix.from_rows([[columns[j][i] for j in range(matrix.rows)] for i in range(matrix.rows)])


def det_norm(matrix: PAdicMatrix) -> Fraction:
    """|det matrix|_p as the product of pivot norms."""
    _, pivots = _forward_eliminate(matrix, [])
    result = Fraction(1)
    for pivot in pivots:
        result *= pivot.norm()
    return result

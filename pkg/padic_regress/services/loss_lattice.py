"""
Loss evaluation on integer residues modulo p^T.

The stochastic walk and the Gibbs oracle only ever move integral weights, so
they work on representatives in [0, p^T) instead of PAdicNumber objects. A
residual r contributes p^(T - v(r)) to an integer total; the loss is that total
over N * p^T. Residuals divisible by p^T count 0 in `value` and p^-T in the
upper bound, matching `regression.loss_from_residuals`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from padic_regress.services.linalg import DimensionMismatchError, PAdicMatrix
from padic_regress.services.padic import PAdicNumber, int_valuation
from padic_regress.services.regression import EmptyPartitionError, LossValue


@dataclass(frozen=True, slots=True)
class LatticeLoss:
    prime: int
    digits: int
    design: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise EmptyPartitionError("lattice loss needs at least one record")
        if len(self.design) != len(self.labels):
            raise DimensionMismatchError(
                f"{len(self.design)} design rows for {len(self.labels)} labels"
            )
        if self.digits < 1:
            raise ValueError(f"digits must be >= 1, got {self.digits}")

    @classmethod
    def from_design(
        cls, matrix: PAdicMatrix, labels: Sequence[PAdicNumber], digits: int
    ) -> LatticeLoss:
        design = tuple(
            tuple(entry.residue(digits) for entry in matrix.row(i)) for i in range(matrix.rows)
        )
        return cls(matrix.prime, digits, design, tuple(y.residue(digits) for y in labels))

    @property
    def modulus(self) -> int:
        return self.prime**self.digits

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def width(self) -> int:
        return len(self.design[0])

    @property
    def denominator(self) -> int:
        return self.size * self.modulus

    def residuals(self, weights: Sequence[int]) -> list[int]:
        if len(weights) != self.width:
            raise DimensionMismatchError(f"{len(weights)} weights for {self.width} columns")
        modulus = self.modulus
        return [
            (y - sum(a * w for a, w in zip(row, weights))) % modulus
            for row, y in zip(self.design, self.labels)
        ]

    def shift_residuals(self, residuals: Sequence[int], step: Sequence[int]) -> list[int]:
        """Residuals after weights += step."""
        modulus = self.modulus
        return [
            (r - sum(a * s for a, s in zip(row, step))) % modulus
            for row, r in zip(self.design, residuals)
        ]

    def contribution(self, residual: int) -> int:
        if residual == 0:
            return 0
        return self.prime ** (self.digits - int_valuation(residual, self.prime))

    def total_of(self, residuals: Sequence[int]) -> int:
        return sum(self.contribution(r) for r in residuals)

    def total(self, weights: Sequence[int]) -> int:
        return self.total_of(self.residuals(weights))

    def value(self, total: int) -> Fraction:
        return Fraction(total, self.denominator)

    def loss(self, weights: Sequence[int]) -> LossValue:
        residuals = self.residuals(weights)
        total = self.total_of(residuals)
        zeros = residuals.count(0)
        return LossValue(
            value=self.value(total),
            upper_bound=self.value(total + zeros),
            bound_flag=zeros > 0,
            count=self.size,
        )

    def to_padic(self, weights: Sequence[int]) -> tuple[PAdicNumber, ...]:
        return tuple(PAdicNumber.from_residue(w, self.prime, self.digits) for w in weights)

    def from_padic(self, weights: Sequence[PAdicNumber]) -> tuple[int, ...]:
        """Representatives of integral weights modulo p^T; unknown digits read as 0."""
        return tuple(w.to_integer() % self.modulus for w in weights)

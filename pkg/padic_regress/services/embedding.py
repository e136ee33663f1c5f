"""
Digit interleaving Z_p^n -> Z_p: digit j of coordinate i lands at position n*j + i - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from padic_regress.services.padic import (
    INFINITE,
    NotIntegralError,
    PAdicNumber,
    PrecisionPolicy,
    PrimeMismatchError,
    digits_of,
    from_integer,
    integer_at_precision,
)


@dataclass(frozen=True, slots=True)
class PointND:
    """A point of Z_p^n."""

    prime: int
    coordinates: tuple[PAdicNumber, ...]

    def __post_init__(self) -> None:
        if not self.coordinates:
            raise ValueError("a point needs at least one coordinate")
        for index, value in enumerate(self.coordinates):
            if value.prime != self.prime:
                raise PrimeMismatchError(f"coordinate {index + 1} is over Q_{value.prime}")
            if not value.is_integral:
                raise NotIntegralError(f"coordinate {index + 1} = {value} is not in Z_p")

    @classmethod
    def from_integers(
        cls, values: Sequence[int], prime: int, policy: PrecisionPolicy | None = None
    ) -> PointND:
        return cls(prime, tuple(from_integer(v, prime, policy) for v in values))

    @classmethod
    def at_precision(
        cls, values: Sequence[int], prime: int, policy: PrecisionPolicy | None = None
    ) -> PointND:
        """Integer coordinates read modulo p^(M+G), as dataset files hold them."""
        return cls(prime, tuple(integer_at_precision(v, prime, policy) for v in values))

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def norm(self) -> Fraction:
        return max(value.norm() for value in self.coordinates)

    def to_text(self) -> str:
        return " ; ".join(value.to_text() for value in self.coordinates)


def distance(x: PointND, y: PointND) -> Fraction:
    """Ultrametric distance max_i |x_i - y_i|_p."""
    if x.dimension != y.dimension:
        raise ValueError(f"dimension mismatch: {x.dimension} vs {y.dimension}")
    return max((a - b).norm() for a, b in zip(x.coordinates, y.coordinates))


def _spread(value: PAdicNumber, dimension: int) -> int:
    """Integer whose digit n*j is digit j of value."""
    if value.is_exact_zero:
        return 0
    prime = value.prime
    stride = prime**dimension
    result = 0
    for digit in reversed(digits_of(value.to_integer(), prime, int(value.abs_precision))):
        result = result * stride + digit
    return result


def phi(x: PAdicNumber, dimension: int) -> PAdicNumber:
    """Move digit j of x to position dimension*j; the other positions are zero."""
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    if not x.is_integral:
        raise NotIntegralError(f"phi needs x in Z_p, got {x}")
    if x.is_exact_zero:
        return x
    return PAdicNumber.from_residue(_spread(x, dimension), x.prime, dimension * int(x.abs_precision))


def interleave(point: PointND) -> PAdicNumber:
    """sum_i p^(i-1) phi(x_i): a carry-free merge of the coordinates' digit strings."""
    dimension = point.dimension
    prime = point.prime
    precision: int | float = INFINITE
    value = 0
    for index, coordinate in enumerate(point.coordinates):
        if coordinate.is_exact_zero:
            continue
        precision = min(precision, dimension * int(coordinate.abs_precision) + index)
        value += prime**index * _spread(coordinate, dimension)
    if precision == INFINITE:
        return PAdicNumber.zero(prime)
    return PAdicNumber.from_residue(value, prime, precision)


def deinterleave(z: PAdicNumber, dimension: int) -> PointND:
    """Inverse of interleave: coordinate i collects positions congruent to i-1 mod n."""
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    if not z.is_integral:
        raise NotIntegralError(f"deinterleave needs z in Z_p, got {z}")
    prime = z.prime
    if z.is_exact_zero:
        return PointND(prime, (PAdicNumber.zero(prime),) * dimension)

    total = max(int(z.abs_precision), 0)
    digits = digits_of(z.to_integer(), prime, total)
    coordinates = []
    for index in range(dimension):
        own = digits[index::dimension]
        value = 0
        for digit in reversed(own):
            value = value * prime + digit
        coordinates.append(PAdicNumber.from_residue(value, prime, len(own)))
    return PointND(prime, tuple(coordinates))


def interleave_integers(values: Sequence[int], prime: int) -> int:
    """interleave on nonnegative integer coordinates, carried out over the integers."""
    dimension = len(values)
    result = 0
    for index, value in enumerate(values):
        if value < 0:
            raise ValueError(f"coordinate {index + 1} is negative: {value}")
        position = index
        while value:
            value, digit = divmod(value, prime)
            result += digit * prime**position
            position += dimension
    return result

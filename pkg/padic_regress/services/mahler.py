"""
Binomial (Mahler) basis: omega_k(x) = C(x, k), coefficient extraction by forward
differences, and truncated series evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from padic_regress.services.padic import (
    NotIntegralError,
    PAdicNumber,
    PrecisionExhaustedError,
    PrecisionPolicy,
    PrimeMismatchError,
    factorial_valuation,
    from_integer,
)


@dataclass(frozen=True, slots=True)
class MahlerSeries:
    """Truncated Mahler series sum_{k<=K} w_k omega_k(x) with weights in Z_p."""

    prime: int
    weights: tuple[PAdicNumber, ...]

    def __post_init__(self) -> None:
        if not self.weights:
            raise ValueError("a Mahler series needs at least one weight")
        for index, weight in enumerate(self.weights):
            if weight.prime != self.prime:
                raise PrimeMismatchError(f"weight {index} is over Q_{weight.prime}")
            if not weight.is_integral:
                raise NotIntegralError(f"weight {index} = {weight} is not in Z_p")

    @property
    def degree(self) -> int:
        return len(self.weights) - 1

    def evaluate(self, x: PAdicNumber, policy: PrecisionPolicy | None = None) -> PAdicNumber:
        return eval_series(self, x, policy)

    def truncate(self, degree: int) -> MahlerSeries:
        return MahlerSeries(self.prime, self.weights[: degree + 1])

    def extend(self, degree: int) -> MahlerSeries:
        padding = (PAdicNumber.zero(self.prime),) * max(0, degree - self.degree)
        return MahlerSeries(self.prime, self.weights + padding)

    def tail_bound(self, degree: int) -> Fraction:
        """max_{degree < k <= K} |w_k|_p, the ultrametric bound on the truncation error."""
        return max((w.norm() for w in self.weights[degree + 1 :]), default=Fraction(0))


def omega_values(
    degree: int, x: PAdicNumber, policy: PrecisionPolicy | None = None
) -> tuple[PAdicNumber, ...]:
    """
    omega_0(x), ..., omega_degree(x) via omega_k = omega_{k-1} (x - k + 1) / k.

    The recurrence runs on the integer representative of x, where every division
    is exact; omega_k then loses v_p(k!) digits of absolute precision, which must
    stay within the guard budget.
    """
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if not x.is_integral:
        raise NotIntegralError(f"omega_k needs x in Z_p, got {x}")
    policy = policy or PrecisionPolicy()
    prime = x.prime

    if x.is_exact_zero:
        return (from_integer(1, prime, policy),) + (PAdicNumber.zero(prime),) * degree

    base = x.to_integer()
    precision = x.abs_precision
    values: list[PAdicNumber] = []
    current = 1
    for k in range(degree + 1):
        if k:
            current = current * (base - k + 1) // k
        surviving = precision - factorial_valuation(k, prime)
        if surviving < policy.working_digits:
            raise PrecisionExhaustedError(
                f"omega_{k} would keep {surviving} digits, below the {policy.working_digits} "
                f"working digits; raise the guard digits (v_{prime}({k}!) = "
                f"{factorial_valuation(k, prime)})"
            )
        values.append(PAdicNumber.from_residue(current, prime, surviving))
    return tuple(values)


def omega(k: int, x: PAdicNumber, policy: PrecisionPolicy | None = None) -> PAdicNumber:
    return omega_values(k, x, policy)[k]


def combine(weights: Sequence[PAdicNumber], omegas: Sequence[PAdicNumber]) -> PAdicNumber:
    """sum_k w_k omega_k, plain summation."""
    total = PAdicNumber.zero(weights[0].prime)
    for weight, basis_value in zip(weights, omegas):
        total = total + weight * basis_value
    return total


def mahler_coefficients(samples: Sequence[PAdicNumber]) -> MahlerSeries:
    """Weights w_n = Delta^n f(0) from the samples f(0), ..., f(K)."""
    if not samples:
        raise ValueError("at least one sample is required")
    values = list(samples)
    last = len(values) - 1
    for level in range(1, last + 1):
        for i in range(last, level - 1, -1):
            values[i] = values[i] - values[i - 1]
    return MahlerSeries(samples[0].prime, tuple(values))


def eval_series(
    series: MahlerSeries, x: PAdicNumber, policy: PrecisionPolicy | None = None
) -> PAdicNumber:
    return combine(series.weights, omega_values(series.degree, x, policy))


def sup_norm_distance(
    f: Callable[[PAdicNumber], PAdicNumber],
    g: Callable[[PAdicNumber], PAdicNumber],
    points: Iterable[PAdicNumber],
) -> Fraction:
    """max |f(x) - g(x)|_p over a finite set of points."""
    return max(((f(x) - g(x)).norm() for x in points), default=Fraction(0))

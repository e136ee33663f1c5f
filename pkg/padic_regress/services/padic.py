"""
Finite-precision arithmetic in Q_p and Z_p.

A nonzero value is stored as p^v * u, where the unit u is known modulo p^M.
The absolute precision A = v + M travels with every result, so precision loss
from cancellation or division by multiples of p stays visible.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from sympy import isprime

from padic_regress.constants import DEFAULT_GUARD_DIGITS, DEFAULT_WORKING_DIGITS

# Valuation of zero, and absolute precision of an exact zero.
INFINITE = math.inf

ENCODING_PATTERN = re.compile(r"^p\^(?P<valuation>-?\d+)\s*\*\s*(?P<digits>\d+(?:\.\d+)*)$")


class PAdicError(ArithmeticError):
    """Base class for p-adic arithmetic failures."""


class NotPrimeError(PAdicError, ValueError):
    """Raised when a modulus that should be prime is not."""


class PrimeMismatchError(PAdicError, ValueError):
    """Raised when operands live in different Q_p."""


class PAdicZeroDivisionError(PAdicError, ZeroDivisionError):
    """Raised on division by an exact zero."""


class PrecisionExhaustedError(PAdicError):
    """Raised when a result would be known to fewer digits than required."""


class NotIntegralError(PAdicError, ValueError):
    """Raised when a value must lie in Z_p but has negative valuation."""


class EncodingError(PAdicError, ValueError):
    """Raised when a textual p-adic encoding cannot be parsed."""


@lru_cache(maxsize=64)
def check_prime(prime: int) -> int:
    if isinstance(prime, bool) or not isinstance(prime, int) or not isprime(prime):
        raise NotPrimeError(f"{prime} is not prime")
    return prime


def int_valuation(value: int, prime: int) -> int | float:
    """Exponent of `prime` in the integer `value` (INFINITE for zero)."""
    if value == 0:
        return INFINITE
    if prime == 2:
        return (value & -value).bit_length() - 1
    count = 0
    while value % prime == 0:
        value //= prime
        count += 1
    return count


def digit_sum(value: int, prime: int) -> int:
    total = 0
    while value:
        value, digit = divmod(value, prime)
        total += digit
    return total


def factorial_valuation(k: int, prime: int) -> int:
    """v_p(k!) by Legendre's formula."""
    return (k - digit_sum(k, prime)) // (prime - 1)


def digits_of(value: int, prime: int, count: int) -> list[int]:
    """The `count` least significant base-p digits of a nonnegative integer."""
    digits = []
    for _ in range(count):
        value, digit = divmod(value, prime)
        digits.append(digit)
    return digits


def integer_from_digits(digits: Sequence[int], prime: int) -> int:
    value = 0
    for digit in reversed(digits):
        value = value * prime + int(digit)
    return value


@dataclass(frozen=True, slots=True)
class PrecisionPolicy:
    """Working digits M reported to callers, plus G guard digits used internally."""

    working_digits: int = DEFAULT_WORKING_DIGITS
    guard_digits: int = DEFAULT_GUARD_DIGITS

    def __post_init__(self) -> None:
        if self.working_digits < 1:
            raise ValueError(f"working_digits must be >= 1, got {self.working_digits}")
        if self.guard_digits < 0:
            raise ValueError(f"guard_digits must be >= 0, got {self.guard_digits}")

    @property
    def total_digits(self) -> int:
        return self.working_digits + self.guard_digits


@dataclass(frozen=True, slots=True)
class PAdicNumber:
    """
    An element of Q_p at finite absolute precision.

    `valuation` is INFINITE when no nonzero digit is known: the value is either an
    exact zero (`abs_precision` INFINITE too) or indistinguishable from zero modulo
    p^abs_precision.
    """

    prime: int
    valuation: int | float
    unit: int
    abs_precision: int | float

    # construction

    @classmethod
    def zero(cls, prime: int, abs_precision: int | float = INFINITE) -> PAdicNumber:
        return cls(prime, INFINITE, 0, abs_precision)

    @classmethod
    def from_residue(
        cls, value: int, prime: int, abs_precision: int | float, shift: int = 0
    ) -> PAdicNumber:
        """p^shift * value, known modulo p^abs_precision."""
        if abs_precision == INFINITE:
            if value == 0:
                return cls.zero(prime)
            raise PrecisionExhaustedError("nonzero values need a finite precision")
        if value == 0 or abs_precision <= shift:
            return cls.zero(prime, abs_precision)
        value %= prime ** (abs_precision - shift)
        if value == 0:
            return cls.zero(prime, abs_precision)
        extra = int_valuation(value, prime)
        return cls(prime, shift + extra, value // prime**extra, abs_precision)

    @classmethod
    def from_digits(
        cls,
        prime: int,
        valuation: int,
        digits: Sequence[int],
        relative_digits: int | None = None,
    ) -> PAdicNumber:
        """p^valuation * sum(digits[j] p^j), little-endian digits."""
        for digit in digits:
            if not 0 <= digit < prime:
                raise EncodingError(f"digit {digit} out of range [0, {prime - 1}]")
        width = max(len(digits), relative_digits or 0)
        return cls.from_residue(
            integer_from_digits(digits, prime), prime, valuation + width, shift=valuation
        )

    @classmethod
    def parse(cls, text: str, prime: int, policy: PrecisionPolicy | None = None) -> PAdicNumber:
        """Inverse of `to_text`.

        Values of Z_p (including `0`) are read modulo p^(M+G), the precision
        `integer_at_precision` and `generate` write them at. Values with a
        negative valuation keep M+G digits after the point.
        """
        policy = policy or PrecisionPolicy()
        total = policy.total_digits
        stripped = text.strip()
        if stripped == "0":
            return cls.zero(prime, total)
        match = ENCODING_PATTERN.match(stripped)
        if not match:
            raise EncodingError(f"malformed p-adic encoding: {text!r}")
        valuation = int(match.group("valuation"))
        digits = [int(part) for part in match.group("digits").split(".")]
        relative = total if valuation < 0 else total - valuation
        return cls.from_digits(prime, valuation, digits, relative_digits=max(relative, 1))

    # inspection

    @property
    def is_zero(self) -> bool:
        return self.valuation == INFINITE

    @property
    def is_exact_zero(self) -> bool:
        return self.abs_precision == INFINITE

    @property
    def is_integral(self) -> bool:
        if self.is_zero:
            return self.abs_precision >= 0
        return self.valuation >= 0

    @property
    def relative_precision(self) -> int:
        if self.is_zero:
            return 0
        return int(self.abs_precision - self.valuation)

    @property
    def unit_digits(self) -> tuple[int, ...]:
        return tuple(digits_of(self.unit, self.prime, self.relative_precision))

    @property
    def norm_is_bound(self) -> bool:
        """True when `norm()` is only an upper bound (zero at finite precision)."""
        return self.is_zero and not self.is_exact_zero

    def norm(self) -> Fraction:
        if self.is_exact_zero:
            return Fraction(0)
        exponent = self.abs_precision if self.is_zero else self.valuation
        return Fraction(self.prime) ** (-int(exponent))

    def to_fraction(self) -> Fraction:
        """The rational representative p^v * u."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.prime) ** int(self.valuation) * self.unit

    def to_integer(self) -> int:
        """Nonnegative integer representative modulo p^abs_precision (Z_p values only)."""
        if self.is_zero:
            return 0
        if self.valuation < 0:
            raise NotIntegralError(f"{self.to_text()} does not lie in Z_p")
        return self.prime ** int(self.valuation) * self.unit

    def residue(self, digits: int) -> int:
        """Integer representative modulo p^digits; the value must be known that far."""
        if self.abs_precision < digits:
            raise PrecisionExhaustedError(
                f"value known to {self.abs_precision} digits, {digits} requested"
            )
        return self.to_integer() % self.prime**digits

    # precision management

    def truncate(self, abs_precision: int) -> PAdicNumber:
        if abs_precision >= self.abs_precision:
            return self
        if self.is_zero:
            return PAdicNumber.zero(self.prime, abs_precision)
        return PAdicNumber.from_residue(
            self.unit, self.prime, abs_precision, shift=int(self.valuation)
        )

    def integral_part(self) -> PAdicNumber:
        """Drop the digits at negative powers of p."""
        if self.is_integral:
            return self
        if self.abs_precision <= 0:
            return PAdicNumber.zero(self.prime, self.abs_precision)
        dropped = -int(self.valuation)
        return PAdicNumber.from_residue(self.unit // self.prime**dropped, self.prime, self.abs_precision)

    def congruent(self, other: PAdicNumber, abs_precision: int | float | None = None) -> bool:
        """Equality up to the common known precision (optionally capped lower)."""
        difference = sub(self, other)
        floor = difference.abs_precision
        if abs_precision is not None:
            floor = min(floor, abs_precision)
        return difference.valuation >= floor

    # text

    def to_text(self, abs_precision: int | None = None) -> str:
        """`p^<v> * <d0>.<d1>...`, least significant digit first, trailing zeros trimmed."""
        value = self if abs_precision is None else self.truncate(abs_precision)
        if value.is_zero:
            return "0"
        digits = list(value.unit_digits)
        while len(digits) > 1 and digits[-1] == 0:
            digits.pop()
        return f"p^{int(value.valuation)} * " + ".".join(str(d) for d in digits)

    def __str__(self) -> str:
        return self.to_text()

    # operators

    def __neg__(self) -> PAdicNumber:
        return neg(self)

    def __add__(self, other: PAdicNumber) -> PAdicNumber:
        return add(self, other)

    def __sub__(self, other: PAdicNumber) -> PAdicNumber:
        return sub(self, other)

    def __mul__(self, other: PAdicNumber) -> PAdicNumber:
        return mul(self, other)

    def __truediv__(self, other: PAdicNumber) -> PAdicNumber:
        return div(self, other)


def from_integer(value: int, prime: int, policy: PrecisionPolicy | None = None) -> PAdicNumber:
    """Canonical expansion of an integer, truncated to the policy's working precision."""
    check_prime(prime)
    policy = policy or PrecisionPolicy()
    if value == 0:
        return PAdicNumber.zero(prime)
    valuation = int_valuation(value, prime)
    return PAdicNumber.from_residue(value, prime, valuation + policy.total_digits)


def integer_at_precision(value: int, prime: int, policy: PrecisionPolicy | None = None) -> PAdicNumber:
    """An integer read modulo p^(M+G), the absolute precision of dataset values."""
    check_prime(prime)
    policy = policy or PrecisionPolicy()
    return PAdicNumber.from_residue(value, prime, policy.total_digits)


def from_rational(
    numerator: int, denominator: int, prime: int, policy: PrecisionPolicy | None = None
) -> PAdicNumber:
    check_prime(prime)
    policy = policy or PrecisionPolicy()
    if denominator == 0:
        raise PAdicZeroDivisionError("zero denominator")
    if numerator == 0:
        return PAdicNumber.zero(prime)
    num_valuation = int_valuation(numerator, prime)
    den_valuation = int_valuation(denominator, prime)
    modulus = prime**policy.total_digits
    unit_num = numerator // prime**num_valuation
    unit_den = denominator // prime**den_valuation
    unit = unit_num * pow(unit_den, -1, modulus) % modulus
    valuation = num_valuation - den_valuation
    return PAdicNumber(prime, valuation, unit, valuation + policy.total_digits)


def _check_same_prime(a: PAdicNumber, b: PAdicNumber) -> None:
    if a.prime != b.prime:
        raise PrimeMismatchError(f"cannot combine Q_{a.prime} and Q_{b.prime} values")


def neg(a: PAdicNumber) -> PAdicNumber:
    if a.is_zero:
        return a
    modulus = a.prime**a.relative_precision
    return PAdicNumber(a.prime, a.valuation, (-a.unit) % modulus, a.abs_precision)


def add(a: PAdicNumber, b: PAdicNumber) -> PAdicNumber:
    _check_same_prime(a, b)
    precision = min(a.abs_precision, b.abs_precision)
    if a.is_zero and b.is_zero:
        return PAdicNumber.zero(a.prime, precision)
    if a.is_zero:
        base, value = int(b.valuation), b.unit
    elif b.is_zero:
        base, value = int(a.valuation), a.unit
    else:
        base = int(min(a.valuation, b.valuation))
        value = a.unit * a.prime ** int(a.valuation - base) + b.unit * b.prime ** int(
            b.valuation - base
        )
    return PAdicNumber.from_residue(value, a.prime, precision, shift=base)


def sub(a: PAdicNumber, b: PAdicNumber) -> PAdicNumber:
    return add(a, neg(b))


def mul(a: PAdicNumber, b: PAdicNumber) -> PAdicNumber:
    _check_same_prime(a, b)
    if a.is_exact_zero or b.is_exact_zero:
        return PAdicNumber.zero(a.prime)
    if a.is_zero or b.is_zero:
        low_a = a.abs_precision if a.is_zero else a.valuation
        low_b = b.abs_precision if b.is_zero else b.valuation
        return PAdicNumber.zero(a.prime, low_a + low_b)
    valuation = a.valuation + b.valuation
    digits = min(a.relative_precision, b.relative_precision)
    unit = a.unit * b.unit % a.prime**digits
    return PAdicNumber(a.prime, valuation, unit, valuation + digits)


def div(a: PAdicNumber, b: PAdicNumber) -> PAdicNumber:
    _check_same_prime(a, b)
    if b.is_exact_zero:
        raise PAdicZeroDivisionError("division by exact zero")
    if b.is_zero:
        raise PrecisionExhaustedError(
            f"divisor indistinguishable from zero modulo p^{b.abs_precision}"
        )
    if a.is_exact_zero:
        return a
    if a.is_zero:
        return PAdicNumber.zero(a.prime, a.abs_precision - b.valuation)
    valuation = a.valuation - b.valuation
    digits = min(a.relative_precision, b.relative_precision)
    modulus = a.prime**digits
    unit = a.unit * pow(b.unit, -1, modulus) % modulus
    return PAdicNumber(a.prime, valuation, unit, valuation + digits)


def norm(a: PAdicNumber) -> Fraction:
    return a.norm()


def sum_values(values: Sequence[PAdicNumber], prime: int) -> PAdicNumber:
    total = PAdicNumber.zero(prime)
    for value in values:
        total = add(total, value)
    return total

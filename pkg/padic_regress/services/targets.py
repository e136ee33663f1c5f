"""
Planted target functions and synthetic dataset generation.

Target syntax (CLI `--target`):
    mahler:<w0>,<w1>,...           Mahler weights over the interleaved variable
    poly:<c>:<e1>,...,<en>|...     integer polynomial, one `coef:exponents` term per `|`
    digits:<t0>,...,<t(p-1)>       digit substitution applied to every digit of interleave(x)
Noise syntax (CLI `--noise`): <e>:<q>, adding u p^e with probability q.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from padic_regress.services.dataset_io import Dataset, Partition, Record
from padic_regress.services.embedding import PointND, interleave, interleave_integers
from padic_regress.services.padic import (
    PAdicNumber,
    PrecisionPolicy,
    check_prime,
    digits_of,
    from_integer,
    integer_at_precision,
    integer_from_digits,
    sum_values,
)
from padic_regress.services.regression import RegressionModel, predict

logger = logging.getLogger(__name__)


class TargetFamily(str, Enum):
    MAHLER = "mahler"
    POLYNOMIAL = "poly"
    DIGIT_MAP = "digits"


@dataclass(frozen=True, slots=True)
class NoiseSpec:
    exponent: int
    probability: float

    def __post_init__(self) -> None:
        if self.exponent < 1:
            raise ValueError(f"noise exponent must be >= 1, got {self.exponent}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"noise probability must lie in [0, 1], got {self.probability}")

    @classmethod
    def parse(cls, text: str) -> NoiseSpec:
        try:
            exponent, probability = text.split(":")
            return cls(int(exponent), float(probability))
        except ValueError as exc:
            raise ValueError(f"bad noise spec {text!r}, expected <e>:<q>") from exc

    def to_text(self) -> str:
        return f"{self.exponent}:{self.probability:g}"


@dataclass(frozen=True, slots=True)
class TargetSpec:
    family: TargetFamily
    mahler_weights: tuple[int, ...] = ()
    polynomial_terms: tuple[tuple[int, tuple[int, ...]], ...] = ()
    digit_table: tuple[int, ...] = ()
    noise: NoiseSpec | None = None

    def __post_init__(self) -> None:
        if self.family is TargetFamily.MAHLER and not self.mahler_weights:
            raise ValueError("mahler target needs at least one weight")
        if self.family is TargetFamily.POLYNOMIAL:
            if not self.polynomial_terms:
                raise ValueError("poly target needs at least one term")
            if any(e < 0 for _, exponents in self.polynomial_terms for e in exponents):
                raise ValueError("poly exponents must be >= 0")
        if self.family is TargetFamily.DIGIT_MAP and not self.digit_table:
            raise ValueError("digits target needs a substitution table")

    @classmethod
    def parse(cls, text: str, noise: str | None = None) -> TargetSpec:
        family_text, _, params = text.partition(":")
        try:
            family = TargetFamily(family_text.strip())
        except ValueError as exc:
            raise ValueError(f"unknown target family {family_text!r}") from exc
        noise_spec = NoiseSpec.parse(noise) if noise else None
        try:
            if family is TargetFamily.MAHLER:
                return cls(family, mahler_weights=_int_list(params), noise=noise_spec)
            if family is TargetFamily.DIGIT_MAP:
                return cls(family, digit_table=_int_list(params), noise=noise_spec)
            terms = []
            for term in params.split("|"):
                coefficient, _, exponents = term.partition(":")
                terms.append((int(coefficient), _int_list(exponents)))
            return cls(family, polynomial_terms=tuple(terms), noise=noise_spec)
        except ValueError as exc:
            raise ValueError(f"bad target spec {text!r}: {exc}") from exc

    def to_text(self) -> str:
        if self.family is TargetFamily.MAHLER:
            params = ",".join(str(w) for w in self.mahler_weights)
        elif self.family is TargetFamily.DIGIT_MAP:
            params = ",".join(str(d) for d in self.digit_table)
        else:
            params = "|".join(
                f"{c}:" + ",".join(str(e) for e in exponents) for c, exponents in self.polynomial_terms
            )
        return f"{self.family.value}:{params}"

    def validate(self, prime: int, dimension: int) -> None:
        if self.family is TargetFamily.POLYNOMIAL:
            for _, exponents in self.polynomial_terms:
                if len(exponents) != dimension:
                    raise ValueError(f"poly term needs {dimension} exponents, got {len(exponents)}")
        if self.family is TargetFamily.DIGIT_MAP:
            if len(self.digit_table) != prime:
                raise ValueError(f"digit table needs {prime} entries, got {len(self.digit_table)}")
            if any(not 0 <= d < prime for d in self.digit_table):
                raise ValueError(f"digit table entries must lie in [0, {prime - 1}]")

    def planted_model(self, prime: int, dimension: int, policy: PrecisionPolicy) -> RegressionModel:
        return RegressionModel.from_integers(self.mahler_weights, prime, dimension, policy)

    def evaluate(self, x: PointND, policy: PrecisionPolicy) -> PAdicNumber:
        prime = x.prime
        if self.family is TargetFamily.MAHLER:
            return predict(self.planted_model(prime, x.dimension, policy), x, policy)
        if self.family is TargetFamily.POLYNOMIAL:
            terms = []
            for coefficient, exponents in self.polynomial_terms:
                value = from_integer(coefficient, prime, policy)
                for coordinate, exponent in zip(x.coordinates, exponents):
                    for _ in range(exponent):
                        value = value * coordinate
                terms.append(value)
            return sum_values(terms, prime)
        zeta = interleave(x)
        if zeta.is_exact_zero:
            width = policy.total_digits
            digits = [0] * width
        else:
            width = int(zeta.abs_precision)
            digits = digits_of(zeta.to_integer(), prime, width)
        mapped = integer_from_digits([self.digit_table[d] for d in digits], prime)
        return PAdicNumber.from_residue(mapped, prime, width)

    def exact_label(self, coordinates: Sequence[int], prime: int, digits: int) -> int:
        """Label of an integer point modulo p^digits, computed over the integers."""
        if self.family is TargetFamily.POLYNOMIAL:
            total = 0
            for coefficient, exponents in self.polynomial_terms:
                total += coefficient * math.prod(c**e for c, e in zip(coordinates, exponents))
            return total % prime**digits
        zeta = interleave_integers(coordinates, prime)
        if self.family is TargetFamily.MAHLER:
            total = sum(w * math.comb(zeta, k) for k, w in enumerate(self.mahler_weights))
            return total % prime**digits
        return integer_from_digits(
            [self.digit_table[d] for d in digits_of(zeta, prime, digits)], prime
        )


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def _random_unit(rng: np.random.Generator, prime: int, digits: int) -> int:
    draws = [int(d) for d in rng.integers(0, prime, size=digits)]
    draws[0] = int(rng.integers(1, prime))
    return integer_from_digits(draws, prime)


def generate(
    spec: TargetSpec,
    dimension: int,
    count: int,
    prime: int,
    working_digits: int,
    seed: int,
    guard_digits: int | None = None,
) -> Dataset:
    """N uniform points of Z_p^n at M digits, labelled by the target (plus optional noise)."""
    check_prime(prime)
    spec.validate(prime, dimension)
    policy = (
        PrecisionPolicy(working_digits)
        if guard_digits is None
        else PrecisionPolicy(working_digits, guard_digits)
    )
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, prime, size=(count, dimension, working_digits))

    records = []
    perturbed = 0
    total = policy.total_digits
    for row in draws:
        coordinates = [integer_from_digits(list(d), prime) for d in row]
        x = PointND.at_precision(coordinates, prime, policy)
        label = spec.exact_label(coordinates, prime, total)
        if spec.noise and rng.random() < spec.noise.probability:
            label += _random_unit(rng, prime, working_digits) * prime**spec.noise.exponent
            perturbed += 1
        records.append(Record(x, integer_at_precision(label, prime, policy), Partition.TRAIN))

    comment = f"target={spec.to_text()} seed={seed} noise={spec.noise.to_text() if spec.noise else 'off'}"
    logger.info("Generated %d records for %s (%d perturbed)", count, spec.to_text(), perturbed)
    return Dataset(prime, dimension, working_digits, tuple(records), (comment,))

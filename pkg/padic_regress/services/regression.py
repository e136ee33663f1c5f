"""
The p-adic polynomial regression function, its residuals and loss, and the model file.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

from padic_regress.constants import DEFAULT_GUARD_DIGITS, MODEL_HEADER
from padic_regress.services.dataset_io import Dataset, Partition, Record
from padic_regress.services.embedding import PointND, deinterleave, interleave
from padic_regress.services.mahler import MahlerSeries, combine, mahler_coefficients, omega_values
from padic_regress.services.padic import (
    EncodingError,
    NotPrimeError,
    PAdicNumber,
    PrecisionPolicy,
    check_prime,
    from_integer,
)

logger = logging.getLogger(__name__)

FIELD_PATTERN = re.compile(r"^(?P<key>prime|n|K|M)=(?P<value>\d+)$")
WEIGHT_PATTERN = re.compile(r"^w\[(?P<index>\d+)\]=(?P<value>.+)$")


class ModelMismatchError(ValueError):
    """Raised when a model and its inputs disagree on prime, dimension or precision."""


class EmptyPartitionError(ValueError):
    """Raised when a loss or fit is requested on a partition without records."""


class ModelFormatError(ValueError):
    """Raised when a model file is malformed."""


@dataclass(frozen=True, slots=True)
class LossValue:
    """
    (1/N) sum_a |l_a|_p as an exact rational.

    `value` counts residuals that vanish at working precision as 0; `upper_bound`
    counts them at their bound p^-A, and `bound_flag` records that this happened.
    """

    value: Fraction
    upper_bound: Fraction
    bound_flag: bool
    count: int

    def __str__(self) -> str:
        text = f"{self.value.numerator}/{self.value.denominator}"
        if self.bound_flag:
            text += f" (bound {self.upper_bound.numerator}/{self.upper_bound.denominator})"
        return text


def loss_from_residuals(residuals: Sequence[PAdicNumber]) -> LossValue:
    if not residuals:
        raise EmptyPartitionError("loss over an empty set of residuals")
    certain = Fraction(0)
    bounded = Fraction(0)
    for value in residuals:
        if value.norm_is_bound:
            bounded += value.norm()
        else:
            certain += value.norm()
    count = len(residuals)
    return LossValue(
        value=certain / count,
        upper_bound=(certain + bounded) / count,
        bound_flag=any(value.norm_is_bound for value in residuals),
        count=count,
    )


@dataclass(frozen=True, slots=True)
class RegressionModel:
    """f(x, w) = sum_{k<=K} w_k omega_k(interleave(x)); weights may leave Z_p."""

    prime: int
    dimension: int
    weights: tuple[PAdicNumber, ...]
    working_digits: int

    def __post_init__(self) -> None:
        check_prime(self.prime)
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if not self.weights:
            raise ValueError("a model needs at least one weight")
        if any(w.prime != self.prime for w in self.weights):
            raise ModelMismatchError("weights must share the model prime")

    @classmethod
    def from_integers(
        cls,
        weights: Sequence[int],
        prime: int,
        dimension: int,
        policy: PrecisionPolicy | None = None,
    ) -> RegressionModel:
        policy = policy or PrecisionPolicy()
        return cls(
            prime,
            dimension,
            tuple(from_integer(w, prime, policy) for w in weights),
            policy.working_digits,
        )

    @property
    def degree(self) -> int:
        return len(self.weights) - 1

    @property
    def is_integral(self) -> bool:
        return all(w.is_integral for w in self.weights)

    @property
    def series(self) -> MahlerSeries:
        return MahlerSeries(self.prime, self.weights)

    def extended(self, degree: int) -> RegressionModel:
        padding = (PAdicNumber.zero(self.prime),) * max(0, degree - self.degree)
        return replace(self, weights=self.weights + padding)

    def with_weight(self, index: int, value: PAdicNumber) -> RegressionModel:
        weights = list(self.weights)
        weights[index] = value
        return replace(self, weights=tuple(weights))


def _check_point(model: RegressionModel, x: PointND) -> None:
    if x.prime != model.prime:
        raise ModelMismatchError(f"point over Q_{x.prime}, model over Q_{model.prime}")
    if x.dimension != model.dimension:
        raise ModelMismatchError(f"point of dimension {x.dimension}, model expects {model.dimension}")


def predict(model: RegressionModel, x: PointND, policy: PrecisionPolicy | None = None) -> PAdicNumber:
    _check_point(model, x)
    return combine(model.weights, omega_values(model.degree, interleave(x), policy))


def residual(
    model: RegressionModel, x: PointND, y: PAdicNumber, policy: PrecisionPolicy | None = None
) -> PAdicNumber:
    return y - predict(model, x, policy)


def residuals(
    model: RegressionModel, records: Iterable[Record], policy: PrecisionPolicy | None = None
) -> list[PAdicNumber]:
    return [residual(model, record.x, record.y, policy) for record in records]


def loss(
    model: RegressionModel,
    data: Dataset,
    partition: Partition = Partition.TRAIN,
    policy: PrecisionPolicy | None = None,
) -> LossValue:
    records = data.records_for(partition)
    if not records:
        raise EmptyPartitionError(f"partition {partition.value!r} has no records")
    return loss_from_residuals(residuals(model, records, policy))


def residual_vector_norm(
    model: RegressionModel, records: Sequence[Record], policy: PrecisionPolicy | None = None
) -> Fraction:
    """|l(w)|_p = max_a |l_a(w)|_p, counting at-precision zeros at their bound."""
    if not records:
        raise EmptyPartitionError("no records")
    return max(value.norm() for value in residuals(model, records, policy))


def approximate_function(
    target: Callable[[PointND], PAdicNumber],
    degree: int,
    dimension: int,
    prime: int,
    policy: PrecisionPolicy | None = None,
) -> RegressionModel:
    """
    Fit h = target o deinterleave by its Mahler coefficients at 0..degree, so that
    the model agrees with target on the points whose interleave is 0..degree.
    """
    policy = policy or PrecisionPolicy()
    samples = [
        target(deinterleave(from_integer(node, prime, policy), dimension))
        for node in range(degree + 1)
    ]
    series = mahler_coefficients(samples)
    return RegressionModel(prime, dimension, series.weights, policy.working_digits)


def write_model(model: RegressionModel) -> str:
    lines = [
        MODEL_HEADER,
        f"prime={model.prime}",
        f"n={model.dimension}",
        f"K={model.degree}",
        f"M={model.working_digits}",
    ]
    lines.extend(
        f"w[{index}]={weight.to_text(model.working_digits)}" for index, weight in enumerate(model.weights)
    )
    return "\n".join(lines) + "\n"


def parse_model(text: str, guard_digits: int = DEFAULT_GUARD_DIGITS) -> RegressionModel:
    lines = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not lines or lines[0] != MODEL_HEADER:
        raise ModelFormatError(f"expected header {MODEL_HEADER!r}")

    fields: dict[str, int] = {}
    encoded: dict[int, str] = {}
    for line in lines[1:]:
        if match := FIELD_PATTERN.match(line):
            fields[match.group("key")] = int(match.group("value"))
        elif match := WEIGHT_PATTERN.match(line):
            encoded[int(match.group("index"))] = match.group("value")
        else:
            raise ModelFormatError(f"unrecognized line {line!r}")

    missing = {"prime", "n", "K", "M"} - fields.keys()
    if missing:
        raise ModelFormatError(f"missing fields: {', '.join(sorted(missing))}")
    degree = fields["K"]
    if sorted(encoded) != list(range(degree + 1)):
        raise ModelFormatError(f"expected weights w[0]..w[{degree}]")

    try:
        prime = check_prime(fields["prime"])
        policy = PrecisionPolicy(fields["M"], guard_digits)
        # weights are trusted to the model's M digits only
        weights = tuple(
            PAdicNumber.parse(encoded[k], prime, policy).truncate(fields["M"])
            for k in range(degree + 1)
        )
        return RegressionModel(prime, fields["n"], weights, fields["M"])
    except (NotPrimeError, EncodingError, ValueError) as exc:
        raise ModelFormatError(str(exc)) from exc


def load_model(path: Path, guard_digits: int = DEFAULT_GUARD_DIGITS) -> RegressionModel:
    return parse_model(Path(path).read_text(encoding="utf-8"), guard_digits)


def save_model(model: RegressionModel, path: Path) -> None:
    Path(path).write_text(write_model(model), encoding="utf-8")
    logger.info("Wrote degree-%d model to %s", model.degree, path)

"""
Dataset records, the line-oriented dataset file format, and train/validation splits.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from padic_regress.constants import DATASET_HEADER, DEFAULT_GUARD_DIGITS
from padic_regress.services.embedding import PointND
from padic_regress.services.padic import (
    EncodingError,
    NotPrimeError,
    PAdicNumber,
    PrecisionPolicy,
    check_prime,
)

logger = logging.getLogger(__name__)

HEADER_PATTERN = re.compile(
    r"^" + re.escape(DATASET_HEADER) + r" p=(?P<prime>\d+) n=(?P<dimension>\d+) M=(?P<digits>\d+)$"
)


class DatasetFormatError(ValueError):
    """Raised when a dataset file is malformed; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None) -> None:
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(prefix + message)
        self.line_number = line_number


class Partition(str, Enum):
    TRAIN = "train"
    VALIDATION = "val"
    ALL = "all"


@dataclass(frozen=True, slots=True)
class Record:
    x: PointND
    y: PAdicNumber
    split: Partition = Partition.TRAIN


@dataclass(frozen=True, slots=True)
class Dataset:
    """Records (x in Z_p^n, y in Z_p) sharing prime, dimension and working digits."""

    prime: int
    dimension: int
    working_digits: int
    records: tuple[Record, ...] = ()
    comments: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        check_prime(self.prime)
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        for index, record in enumerate(self.records):
            if record.x.prime != self.prime or record.y.prime != self.prime:
                raise ValueError(f"record {index} uses a different prime")
            if record.x.dimension != self.dimension:
                raise ValueError(f"record {index} has dimension {record.x.dimension}")
            if record.split is Partition.ALL:
                raise ValueError(f"record {index} must be tagged train or val")

    def __len__(self) -> int:
        return len(self.records)

    def records_for(self, partition: Partition) -> tuple[Record, ...]:
        if partition is Partition.ALL:
            return self.records
        return tuple(r for r in self.records if r.split is partition)

    @property
    def train_count(self) -> int:
        return len(self.records_for(Partition.TRAIN))

    @property
    def validation_count(self) -> int:
        return len(self.records_for(Partition.VALIDATION))

    def policy(self, guard_digits: int = DEFAULT_GUARD_DIGITS) -> PrecisionPolicy:
        return PrecisionPolicy(self.working_digits, guard_digits)

    def with_records(self, records: Sequence[Record]) -> Dataset:
        return replace(self, records=tuple(records))


def write_dataset(data: Dataset) -> str:
    lines = [f"{DATASET_HEADER} p={data.prime} n={data.dimension} M={data.working_digits}"]
    lines.extend(f"# {comment}" for comment in data.comments)
    for record in data.records:
        fields = [value.to_text() for value in record.x.coordinates]
        fields.append(record.y.to_text())
        fields.append(record.split.value)
        lines.append(" ; ".join(fields))
    return "\n".join(lines) + "\n"


def parse_dataset(text: str, guard_digits: int = DEFAULT_GUARD_DIGITS) -> Dataset:
    lines = text.splitlines()
    if not lines:
        raise DatasetFormatError("empty file, expected a header", 1)
    match = HEADER_PATTERN.match(lines[0].strip())
    if not match:
        raise DatasetFormatError(f"bad header {lines[0]!r}", 1)
    prime = int(match.group("prime"))
    dimension = int(match.group("dimension"))
    digits = int(match.group("digits"))
    try:
        check_prime(prime)
        policy = PrecisionPolicy(digits, guard_digits)
    except (NotPrimeError, ValueError) as exc:
        raise DatasetFormatError(str(exc), 1) from exc
    if dimension < 1:
        raise DatasetFormatError("dimension must be >= 1", 1)

    comments: list[str] = []
    records: list[Record] = []
    for line_number, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        records.append(_parse_record(line, line_number, prime, dimension, policy))

    logger.debug("Parsed %d records (p=%d, n=%d, M=%d)", len(records), prime, dimension, digits)
    return Dataset(prime, dimension, digits, tuple(records), tuple(comments))


def _parse_record(
    line: str, line_number: int, prime: int, dimension: int, policy: PrecisionPolicy
) -> Record:
    fields = [field.strip() for field in line.split(";")]
    if len(fields) != dimension + 2:
        raise DatasetFormatError(
            f"expected {dimension + 2} fields (x1..x{dimension}, y, split), got {len(fields)}",
            line_number,
        )
    try:
        split = Partition(fields[-1])
    except ValueError as exc:
        raise DatasetFormatError(f"unknown split tag {fields[-1]!r}", line_number) from exc
    if split is Partition.ALL:
        raise DatasetFormatError("split tag must be train or val", line_number)

    values = []
    for position, field in enumerate(fields[:-1], start=1):
        try:
            value = PAdicNumber.parse(field, prime, policy)
        except EncodingError as exc:
            raise DatasetFormatError(f"field {position}: {exc}", line_number) from exc
        if not value.is_integral:
            raise DatasetFormatError(f"field {position}: {field} is not in Z_p", line_number)
        values.append(value)
    return Record(PointND(prime, tuple(values[:-1])), values[-1], split)


def load_dataset(path: Path, guard_digits: int = DEFAULT_GUARD_DIGITS) -> Dataset:
    return parse_dataset(Path(path).read_text(encoding="utf-8"), guard_digits)


def save_dataset(data: Dataset, path: Path) -> None:
    Path(path).write_text(write_dataset(data), encoding="utf-8")
    logger.info("Wrote %d records to %s", len(data), path)


def split(data: Dataset, train_fraction: Fraction, seed: int) -> Dataset:
    """Seeded shuffle, then the first floor(fraction * N) shuffled records train."""
    fraction = Fraction(train_fraction)
    if not 0 < fraction <= 1:
        raise ValueError(f"train fraction must lie in (0, 1], got {fraction}")
    count = len(data.records)
    train_size = math.floor(fraction * count)
    order = np.random.default_rng(seed).permutation(count)
    train_positions = {int(index) for index in order[:train_size]}
    records = [
        replace(record, split=Partition.TRAIN if index in train_positions else Partition.VALIDATION)
        for index, record in enumerate(data.records)
    ]
    return data.with_records(records)

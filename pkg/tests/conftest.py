from __future__ import annotations

import random

import numpy as np
import pytest

from padic_regress.config import get_settings
from padic_regress.services.dataset_io import Dataset, Partition, Record
from padic_regress.services.embedding import PointND
from padic_regress.services.padic import PrecisionPolicy, integer_at_precision


@pytest.fixture
def policy() -> PrecisionPolicy:
    return PrecisionPolicy(32, 16)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def pyrng() -> random.Random:
    return random.Random(20240607)


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    for name in (
        "PADIC_WORKING_DIGITS",
        "PADIC_GUARD_DIGITS",
        "PADIC_LOG_LEVEL",
        "PADIC_DEFAULT_SEED",
        "PADIC_ORACLE_MAX_LATTICE",
    ):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def make_dataset(
    rows: list[tuple[list[int], int]],
    prime: int,
    policy: PrecisionPolicy,
    splits: list[Partition] | None = None,
) -> Dataset:
    """Dataset from integer coordinates and labels, read modulo p^(M+G) like a dataset file."""
    dimension = len(rows[0][0])
    records = []
    for index, (coords, label) in enumerate(rows):
        split = splits[index] if splits else Partition.TRAIN
        records.append(
            Record(
                PointND.at_precision(coords, prime, policy),
                integer_at_precision(label, prime, policy),
                split,
            )
        )
    return Dataset(prime, dimension, policy.working_digits, tuple(records))


@pytest.fixture(name="make_dataset")
def make_dataset_fixture():
    return make_dataset

from __future__ import annotations

from fractions import Fraction

import pytest

from padic_regress.services.dataset_io import (
    Dataset,
    DatasetFormatError,
    Partition,
    load_dataset,
    parse_dataset,
    save_dataset,
    split,
    write_dataset,
)
from padic_regress.services.targets import TargetSpec, generate

HEADER = "padic-regress-data v1 p=3 n=2 M=8"


def test_empty_dataset_is_valid():
    data = parse_dataset(HEADER + "\n")
    assert len(data) == 0
    assert (data.prime, data.dimension, data.working_digits) == (3, 2, 8)
    assert write_dataset(data) == HEADER + "\n"


def test_structural_roundtrip(make_dataset, policy):
    data = make_dataset(
        [([1, 2], 7), ([0, 9], 4), ([-1, 5], 0)],
        3,
        policy,
        [Partition.TRAIN, Partition.VALIDATION, Partition.TRAIN],
    )
    assert parse_dataset(write_dataset(data), policy.guard_digits) == data


@pytest.mark.parametrize(
    ("target", "noise"),
    [("mahler:1,2,0,1", None), ("mahler:1,2,0,1", "1:0.5"), ("mahler:0", None), ("digits:2,0,1", None)],
)
def test_generated_dataset_reads_back_unchanged(target, noise):
    data = generate(TargetSpec.parse(target, noise), 2, 10, 3, 12, seed=6, guard_digits=16)
    assert parse_dataset(write_dataset(data), 16) == data


def test_zero_is_read_at_dataset_precision():
    data = parse_dataset(HEADER + "\n0 ; p^2 * 1 ; 0 ; train\n", guard_digits=4)
    record = data.records[0]
    assert record.y.is_zero and not record.y.is_exact_zero
    assert record.y.abs_precision == 12
    assert record.x.coordinates[1].abs_precision == 12


def test_text_roundtrip_is_byte_identical(tmp_path):
    data = generate(TargetSpec.parse("mahler:3,1,4"), 2, 10, 5, 12, seed=3)
    data = split(data, Fraction(7, 10), seed=3)
    path = tmp_path / "data.txt"
    save_dataset(data, path)
    assert write_dataset(load_dataset(path)) == path.read_text(encoding="utf-8")


def test_comments_are_kept():
    data = parse_dataset(HEADER + "\n# made by hand\np^0 * 1 ; 0 ; p^1 * 2 ; val\n")
    assert data.comments == ("made by hand",)
    assert data.validation_count == 1
    assert data.records[0].y.to_integer() == 6


@pytest.mark.parametrize(
    ("body", "line"),
    [
        ("p^0 * 1 ; p^0 * 3 ; 0 ; train\n", 2),
        ("0 ; 0 ; 0 ; train\np^-1 * 1 ; 0 ; 0 ; train\n", 3),
        ("0 ; 0 ; train\n", 2),
        ("0 ; 0 ; 0 ; test\n", 2),
        ("0 ; 0 ; 0 ; all\n", 2),
        ("# note\n\n0 ; x ; 0 ; val\n", 4),
    ],
)
def test_malformed_rows_name_their_line(body, line):
    with pytest.raises(DatasetFormatError) as info:
        parse_dataset(HEADER + "\n" + body)
    assert info.value.line_number == line
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize(
    "header",
    ["", "padic-regress-data v2 p=3 n=2 M=8", "padic-regress-data v1 p=9 n=2 M=8", "padic-regress-data v1 p=3 n=0 M=8"],
)
def test_bad_headers(header):
    with pytest.raises(DatasetFormatError):
        parse_dataset(header + "\n" if header else "")


def _ten_records(make_dataset, policy) -> Dataset:
    return make_dataset([([a, a + 1], a) for a in range(10)], 3, policy)


def test_split_sizes(make_dataset, policy):
    data = _ten_records(make_dataset, policy)
    assert split(data, Fraction(1), seed=1).train_count == 10

    parts = split(data, Fraction(7, 10), seed=1)
    assert (parts.train_count, parts.validation_count) == (7, 3)


def test_split_is_a_seeded_partition(make_dataset, policy):
    data = _ten_records(make_dataset, policy)
    first = split(data, Fraction(1, 2), seed=9)
    again = split(data, Fraction(1, 2), seed=9)
    assert first == again
    assert [(r.x, r.y) for r in first.records] == [(r.x, r.y) for r in data.records]
    with pytest.raises(ValueError):
        split(data, Fraction(0), seed=9)

from __future__ import annotations

from dataclasses import replace

import pytest

from padic_regress.constants import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE
from padic_regress.main import main
from padic_regress.services.dataset_io import Partition, load_dataset, save_dataset
from padic_regress.services.padic import PAdicNumber, PrecisionPolicy, from_integer

PRECISION = ["--M", "32", "--G", "32"]


def _gen(path, *extra, prime="3", count="10"):
    argv = [
        "gen", "--p", prime, "--n", "2", "--N", count, "--seed", "1",
        "--target", "mahler:1,2,0,1", "--out", str(path), *PRECISION, *extra,
    ]
    return main(argv)


def _lines(text: str) -> set[str]:
    return set(text.splitlines())


def test_generate_fit_eval_pipeline(tmp_path, capsys):
    data_path = tmp_path / "data.txt"
    model_path = tmp_path / "model.txt"

    assert _gen(data_path, "--train-frac", "4/10") == EXIT_OK
    assert {"train: 4", "val: 6"} <= _lines(capsys.readouterr().out)

    assert main(["fit", "--in", str(data_path), "--out", str(model_path), *PRECISION]) == EXIT_OK
    fit_lines = _lines(capsys.readouterr().out)
    assert {"loss: 0/1", "bound_flag: true", "integral: true", "certificate: true"} <= fit_lines

    eval_argv = ["eval", "--model", str(model_path), "--in", str(data_path), *PRECISION]
    assert main(eval_argv) == EXIT_OK
    assert {
        "loss[train]: 0/1",
        "bound_flag[train]: true",
        "loss[val]: 0/1",
        "bound_flag[val]: true",
        "count[val]: 6",
    } <= _lines(capsys.readouterr().out)

    data = load_dataset(data_path, 32)
    records = list(data.records)
    index = next(i for i, r in enumerate(records) if r.split is Partition.VALIDATION)
    nine = from_integer(9, 3, PrecisionPolicy(32, 32))
    records[index] = replace(records[index], y=records[index].y + nine)
    save_dataset(data.with_records(records), data_path)

    assert main(eval_argv) == EXIT_OK
    lines = _lines(capsys.readouterr().out)
    assert "loss[val]: 1/54" in lines
    assert "loss[train]: 0/1" in lines


def test_fit_writes_report_and_trajectory(tmp_path, capsys):
    data_path = tmp_path / "data.txt"
    assert _gen(data_path, prime="2", count="6") == EXIT_OK
    capsys.readouterr()

    argv = [
        "fit", "--in", str(data_path), "--out", str(tmp_path / "model.txt"),
        "--mode", "stochastic", "--K", "2", "--steps", "0", "--seed", "3",
        "--report", str(tmp_path / "fit.txt"), "--trajectory", str(tmp_path / "loss.csv"),
        *PRECISION,
    ]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert {"chain: 0", "accepted_moves: 0", "config.seed: 3", "config.steps: 0"} <= _lines(out)
    assert (tmp_path / "fit.txt").read_text(encoding="utf-8") == out

    csv_lines = (tmp_path / "loss.csv").read_text(encoding="utf-8").splitlines()
    assert csv_lines[0] == "step,loss_num,loss_den"
    assert len(csv_lines) == 2

    assert main(["inspect", "--model", str(tmp_path / "model.txt"), *PRECISION]) == EXIT_OK
    summary = _lines(capsys.readouterr().out)
    assert {"kind: model", "K: 2", "valuation[0]: inf", "valuation[2]: inf"} <= summary


def test_predict_reproduces_training_labels(tmp_path, capsys):
    data_path = tmp_path / "data.txt"
    model_path = tmp_path / "model.txt"
    assert _gen(data_path, count="4") == EXIT_OK
    assert main(["fit", "--in", str(data_path), "--out", str(model_path), *PRECISION]) == EXIT_OK
    capsys.readouterr()

    assert main(["predict", "--model", str(model_path), "--in", str(data_path), *PRECISION]) == EXIT_OK
    predictions = capsys.readouterr().out.splitlines()
    data = load_dataset(data_path, 32)
    assert len(predictions) == len(data)
    policy = PrecisionPolicy(32, 32)
    for line, record in zip(predictions, data.records):
        assert PAdicNumber.parse(line, 3, policy).congruent(record.y, 30)

    argv = ["predict", "--model", str(model_path), "--point", "p^0 * 1", "p^0 * 2", *PRECISION]
    assert main(argv) == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 1


def test_inspect_dataset(tmp_path, capsys):
    data_path = tmp_path / "data.txt"
    assert _gen(data_path, "--train-frac", "7/10") == EXIT_OK
    capsys.readouterr()
    assert main(["inspect", "--in", str(data_path), *PRECISION]) == EXIT_OK
    summary = _lines(capsys.readouterr().out)
    assert {"kind: dataset", "prime: 3", "records: 10", "train: 7", "val: 3"} <= summary


def test_eval_without_validation_records(tmp_path, capsys):
    data_path = tmp_path / "data.txt"
    model_path = tmp_path / "model.txt"
    assert _gen(data_path, count="3") == EXIT_OK
    assert main(["fit", "--in", str(data_path), "--out", str(model_path), *PRECISION]) == EXIT_OK
    capsys.readouterr()

    assert main(["eval", "--model", str(model_path), "--in", str(data_path), *PRECISION]) == EXIT_OK
    assert {"loss[val]: n/a", "count[val]: 0"} <= _lines(capsys.readouterr().out)

    argv = ["eval", "--model", str(model_path), "--in", str(data_path), "--partition", "val", *PRECISION]
    assert main(argv) == EXIT_DATA


def test_empty_generation_is_fine(tmp_path, capsys):
    assert _gen(tmp_path / "data.txt", count="0") == EXIT_OK
    assert "records: 0" in _lines(capsys.readouterr().out)


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--p", "4", "--n", "2", "--N", "3", "--target", "mahler:1", "--out", "x.txt"],
        ["gen", "--p", "3", "--n", "2", "--N", "3", "--target", "fourier:1", "--out", "x.txt"],
        ["gen", "--p", "3", "--n", "2", "--N", "3", "--out", "x.txt"],
        ["fit", "--in", "data.txt", "--out", "model.txt", "--mode", "stochastic"],
        ["predict", "--model", "model.txt"],
        ["inspect"],
        ["gen", "--p", "3", "--n", "2", "--N", "3", "--target", "mahler:1", "--train-frac", "3/2", "--out", "x.txt"],
        ["frobnicate"],
        ["fit", "--steps", "many"],
    ],
)
def test_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == EXIT_USAGE


def test_exact_fit_rejects_wrong_degree(tmp_path):
    data_path = tmp_path / "data.txt"
    assert _gen(data_path, count="4") == EXIT_OK
    argv = ["fit", "--in", str(data_path), "--out", str(tmp_path / "m.txt"), "--K", "1", *PRECISION]
    assert main(argv) == EXIT_USAGE


def test_data_errors(tmp_path):
    three = tmp_path / "three.txt"
    five = tmp_path / "five.txt"
    model_path = tmp_path / "model.txt"
    assert _gen(three, count="4") == EXIT_OK
    assert _gen(five, prime="5", count="4") == EXIT_OK
    assert main(["fit", "--in", str(three), "--out", str(model_path), *PRECISION]) == EXIT_OK

    assert main(["eval", "--model", str(model_path), "--in", str(five), *PRECISION]) == EXIT_DATA
    assert main(["fit", "--in", str(tmp_path / "missing.txt"), "--out", str(model_path)]) == EXIT_DATA

    validation_only = tmp_path / "val.txt"
    validation_only.write_text("padic-regress-data v1 p=3 n=1 M=8\np^0 * 1 ; p^0 * 2 ; val\n", encoding="utf-8")
    assert main(["fit", "--in", str(validation_only), "--out", str(model_path)]) == EXIT_DATA

    broken = tmp_path / "broken.txt"
    broken.write_text("padic-regress-data v1 p=3 n=1 M=8\np^0 * 7 ; 0 ; train\n", encoding="utf-8")
    assert main(["inspect", "--in", str(broken)]) == EXIT_DATA


def test_numeric_failure(tmp_path):
    clash = tmp_path / "clash.txt"
    clash.write_text(
        "padic-regress-data v1 p=3 n=1 M=8\np^0 * 1 ; p^0 * 1 ; train\np^0 * 1 ; p^0 * 2 ; train\n",
        encoding="utf-8",
    )
    assert main(["fit", "--in", str(clash), "--out", str(tmp_path / "m.txt")]) == EXIT_NUMERIC


def test_version_flag(capsys):
    assert main(["--version"]) == EXIT_OK
    assert "padic-regress" in capsys.readouterr().out

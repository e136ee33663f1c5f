"""
Model-side subcommands: fit, predict and eval.
"""

from __future__ import annotations

import logging
from pathlib import Path

from padic_regress.commands import UsageError
from padic_regress.models.commands import CommandConfig
from padic_regress.services.dataset_io import Dataset, Partition, load_dataset, split
from padic_regress.services.embedding import PointND
from padic_regress.services.padic import PAdicError, PAdicNumber
from padic_regress.services.regression import (
    ModelMismatchError,
    RegressionModel,
    load_model,
    loss,
    predict,
    save_model,
)
from padic_regress.services.report_builder import (
    build_eval_report,
    build_fit_report,
    build_predictions,
    build_trajectory_csv,
)
from padic_regress.services.training import FitMode, fit_exact, fit_stochastic

logger = logging.getLogger(__name__)


def _write(path: Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
    logger.info("Wrote %s", path)


def _load_training_data(config: CommandConfig) -> Dataset:
    data = load_dataset(config.input_path, config.guard_digits)
    if config.train_fraction is not None:
        data = split(data, config.train_fraction, config.seed)
    return data


def _check_compatible(model: RegressionModel, data: Dataset) -> None:
    if model.prime != data.prime:
        raise ModelMismatchError(f"model over Q_{model.prime}, dataset over Q_{data.prime}")
    if model.dimension != data.dimension:
        raise ModelMismatchError(f"model expects n={model.dimension}, dataset has n={data.dimension}")
    if model.working_digits != data.working_digits:
        raise ModelMismatchError(
            f"model keeps M={model.working_digits} digits, dataset M={data.working_digits}"
        )


def cmd_fit(config: CommandConfig) -> str:
    data = _load_training_data(config)
    policy = config.policy(data.working_digits)
    logger.info(
        "Fitting %s on %d training records (p=%d, n=%d)",
        config.mode.value,
        data.train_count,
        data.prime,
        data.dimension,
    )
    if config.mode is FitMode.EXACT:
        report = fit_exact(data, config.degree, policy)
    else:
        report = fit_stochastic(data, config.trainer_config(), policy)

    save_model(report.model, config.output_path)
    text = build_fit_report(report)
    if config.report_path is not None:
        _write(config.report_path, text)
    if config.trajectory_path is not None:
        _write(config.trajectory_path, build_trajectory_csv(report.trajectory))
    return text


def _parse_point(config: CommandConfig, model: RegressionModel) -> PointND:
    policy = config.policy(model.working_digits)
    try:
        return PointND(
            model.prime,
            tuple(PAdicNumber.parse(text, model.prime, policy) for text in config.point),
        )
    except (PAdicError, ValueError) as exc:
        raise UsageError(f"bad --point: {exc}") from exc


def cmd_predict(config: CommandConfig) -> str:
    model = load_model(config.model_path, config.guard_digits)
    policy = config.policy(model.working_digits)
    if config.point is not None:
        points = [_parse_point(config, model)]
    else:
        data = load_dataset(config.input_path, config.guard_digits)
        _check_compatible(model, data)
        points = [record.x for record in data.records]

    text = build_predictions([predict(model, x, policy) for x in points], model.working_digits)
    if config.output_path is not None:
        _write(config.output_path, text)
    return text


def cmd_eval(config: CommandConfig) -> str:
    model = load_model(config.model_path, config.guard_digits)
    data = _load_training_data(config)
    _check_compatible(model, data)
    policy = config.policy(data.working_digits)

    if config.partition is not None:
        losses = [(config.partition, loss(model, data, config.partition, policy))]
    else:
        losses = [
            (partition, loss(model, data, partition, policy) if data.records_for(partition) else None)
            for partition in (Partition.TRAIN, Partition.VALIDATION)
        ]
    text = build_eval_report(model, losses)
    if config.report_path is not None:
        _write(config.report_path, text)
    return text

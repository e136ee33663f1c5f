"""
Plain-text reports with a stable `key: value` grammar, and trajectory CSV.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from padic_regress.constants import REPORT_HEADER, REPORT_MILESTONES
from padic_regress.services.dataset_io import Dataset, Partition
from padic_regress.services.padic import PAdicNumber
from padic_regress.services.regression import LossValue, RegressionModel
from padic_regress.services.training import FitReport

EVAL_HEADER = "padic-regress-eval v1"
TRAJECTORY_COLUMNS = "step,loss_num,loss_den"


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def format_flag(value: bool | None) -> str:
    if value is None:
        return "n/a"
    return "true" if value else "false"


def _loss_lines(loss: LossValue, suffix: str = "") -> list[str]:
    return [
        f"loss{suffix}: {format_rational(loss.value)}",
        f"loss_bound{suffix}: {format_rational(loss.upper_bound)}",
        f"bound_flag{suffix}: {format_flag(loss.bound_flag)}",
        f"count{suffix}: {loss.count}",
    ]


def _weight_lines(model: RegressionModel) -> list[str]:
    return [
        f"w[{k}]={weight.to_text(model.working_digits)}" for k, weight in enumerate(model.weights)
    ]


def milestone_steps(length: int, milestones: int = REPORT_MILESTONES) -> list[int]:
    """Evenly spaced trajectory indices, always including the first and last."""
    if length <= 0:
        return []
    last = length - 1
    if last == 0:
        return [0]
    return sorted({round(i * last / milestones) for i in range(milestones + 1)})


def build_fit_report(report: FitReport) -> str:
    lines = [REPORT_HEADER]
    lines.extend(f"config.{key}: {value}" for key, value in report.config)
    lines.append(f"prime: {report.model.prime}")
    lines.append(f"n: {report.model.dimension}")
    lines.append(f"K: {report.model.degree}")
    lines.extend(_loss_lines(report.final_loss))
    lines.append(f"integral: {format_flag(report.integral)}")
    if report.det_norm is not None:
        lines.append(f"det_norm: {format_rational(report.det_norm)}")
        lines.append(f"certificate: {format_flag(report.certificate)}")
        lines.extend(
            f"residual_norm[{a}]: {format_rational(norm)}"
            for a, norm in enumerate(report.residual_norms)
        )
    if report.chain is not None:
        lines.append(f"chain: {report.chain}")
        lines.append(f"accepted_moves: {report.accepted_moves}")
    lines.extend(
        f"milestone[{step}]: {format_rational(report.trajectory[step])}"
        for step in milestone_steps(len(report.trajectory))
    )
    lines.extend(_weight_lines(report.model))
    return "\n".join(lines) + "\n"


def build_trajectory_csv(trajectory: Sequence[Fraction]) -> str:
    lines = [TRAJECTORY_COLUMNS]
    lines.extend(
        f"{step},{value.numerator},{value.denominator}" for step, value in enumerate(trajectory)
    )
    return "\n".join(lines) + "\n"


def build_eval_report(
    model: RegressionModel, losses: Sequence[tuple[Partition, LossValue | None]]
) -> str:
    lines = [EVAL_HEADER, f"prime: {model.prime}", f"n: {model.dimension}", f"K: {model.degree}"]
    for partition, loss in losses:
        suffix = f"[{partition.value}]"
        if loss is None:
            lines.append(f"loss{suffix}: n/a")
            lines.append(f"count{suffix}: 0")
        else:
            lines.extend(_loss_lines(loss, suffix))
    lines.append(f"integral: {format_flag(model.is_integral)}")
    return "\n".join(lines) + "\n"


def build_predictions(predictions: Sequence[PAdicNumber], working_digits: int) -> str:
    return "".join(f"{value.to_text(working_digits)}\n" for value in predictions)


def build_dataset_summary(data: Dataset) -> str:
    lines = [
        "kind: dataset",
        f"prime: {data.prime}",
        f"n: {data.dimension}",
        f"M: {data.working_digits}",
        f"records: {len(data)}",
        f"train: {data.train_count}",
        f"val: {data.validation_count}",
    ]
    lines.extend(f"comment: {comment}" for comment in data.comments)
    return "\n".join(lines) + "\n"


def build_model_summary(model: RegressionModel) -> str:
    lines = [
        "kind: model",
        f"prime: {model.prime}",
        f"n: {model.dimension}",
        f"K: {model.degree}",
        f"M: {model.working_digits}",
        f"integral: {format_flag(model.is_integral)}",
    ]
    for k, weight in enumerate(model.weights):
        valuation = "inf" if weight.is_zero else str(int(weight.valuation))
        lines.append(f"valuation[{k}]: {valuation}")
    return "\n".join(lines) + "\n"

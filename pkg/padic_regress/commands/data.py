"""
Dataset-side subcommands: gen and inspect.
"""

from __future__ import annotations

from padic_regress.commands import UsageError
from padic_regress.models.commands import CommandConfig
from padic_regress.services.dataset_io import load_dataset, save_dataset, split
from padic_regress.services.regression import load_model
from padic_regress.services.report_builder import build_dataset_summary, build_model_summary
from padic_regress.services.targets import TargetSpec, generate


def cmd_gen(config: CommandConfig) -> str:
    try:
        spec = TargetSpec.parse(config.target, config.noise)
        spec.validate(config.prime, config.dimension)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    data = generate(
        spec,
        config.dimension,
        config.count,
        config.prime,
        config.working_digits,
        config.seed,
        config.guard_digits,
    )
    if config.train_fraction is not None:
        data = split(data, config.train_fraction, config.seed)
    save_dataset(data, config.output_path)
    return (
        f"target: {spec.to_text()}\n"
        f"noise: {spec.noise.to_text() if spec.noise else 'off'}\n"
        f"seed: {config.seed}\n"
        f"records: {len(data)}\n"
        f"train: {data.train_count}\n"
        f"val: {data.validation_count}\n"
        f"out: {config.output_path}\n"
    )


def cmd_inspect(config: CommandConfig) -> str:
    if config.model_path is not None:
        return build_model_summary(load_model(config.model_path, config.guard_digits))
    return build_dataset_summary(load_dataset(config.input_path, config.guard_digits))

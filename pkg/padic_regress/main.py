"""
Command-line entry point: gen, fit, predict, eval and inspect over the v1 file formats.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence

from pydantic import ValidationError

from padic_regress.commands import UsageError
from padic_regress.commands.data import cmd_gen, cmd_inspect
from padic_regress.commands.model import cmd_eval, cmd_fit, cmd_predict
from padic_regress.config import ConfigurationError, Settings, get_settings
from padic_regress.constants import (
    APP_NAME,
    DEFAULT_BETA0,
    DEFAULT_BETA_GROWTH,
    DEFAULT_RADIUS_Q,
    DEFAULT_STEPS,
    EXIT_DATA,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    VERSION,
)
from padic_regress.models.commands import CommandConfig, Subcommand
from padic_regress.services.dataset_io import DatasetFormatError
from padic_regress.services.padic import PAdicError
from padic_regress.services.regression import EmptyPartitionError, ModelFormatError, ModelMismatchError
from padic_regress.services.training import ExactFitShapeError

logger = logging.getLogger(__name__)

HANDLERS: dict[Subcommand, Callable[[CommandConfig], str]] = {
    Subcommand.GEN: cmd_gen,
    Subcommand.FIT: cmd_fit,
    Subcommand.PREDICT: cmd_predict,
    Subcommand.EVAL: cmd_eval,
    Subcommand.INSPECT: cmd_inspect,
}

USAGE_ERRORS = (UsageError, ExactFitShapeError, ValidationError, ConfigurationError)
DATA_ERRORS = (DatasetFormatError, ModelFormatError, ModelMismatchError, EmptyPartitionError, OSError)


def _shared_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--p", dest="prime", type=int, help="Prime p.")
    parent.add_argument("--n", dest="dimension", type=int, help="Input dimension n.")
    parent.add_argument("--K", dest="degree", type=int, help="Model degree K.")
    parent.add_argument("--M", dest="working_digits", type=int, help="Working digits (gen only).")
    parent.add_argument("--G", dest="guard_digits", type=int, help="Guard digits.")
    parent.add_argument("--N", dest="count", type=int, help="Number of generated records.")
    parent.add_argument("--mode", choices=["exact", "stochastic"], default="exact")
    parent.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    parent.add_argument("--beta0", type=float, default=DEFAULT_BETA0)
    parent.add_argument("--beta-growth", type=float, default=DEFAULT_BETA_GROWTH)
    parent.add_argument("--radius-q", type=float, default=DEFAULT_RADIUS_Q)
    parent.add_argument("--chains", type=int, default=1)
    parent.add_argument("--warm-start", action="store_true", help="Start the walk from an exact sub-fit.")
    parent.add_argument("--seed", type=int, help="Seed for generation, splits and the walk.")
    parent.add_argument("--train-frac", dest="train_fraction", help="Train share, e.g. 7/10 or 0.7.")
    parent.add_argument("--target", help="mahler:<w..> | poly:<c>:<e..>|... | digits:<t..>")
    parent.add_argument("--noise", help="Label noise <e>:<q>.")
    parent.add_argument("--in", dest="input_path", type=Path, help="Dataset file.")
    parent.add_argument("--out", dest="output_path", type=Path, help="Output file.")
    parent.add_argument("--model", dest="model_path", type=Path, help="Model file.")
    parent.add_argument("--report", dest="report_path", type=Path, help="Also write the report here.")
    parent.add_argument("--trajectory", dest="trajectory_path", type=Path, help="Loss trajectory CSV.")
    parent.add_argument("--partition", choices=["train", "val", "all"])
    parent.add_argument("--point", nargs="+", help="Coordinates in p-adic text encoding.")
    parent.add_argument("--log-level", help="Overrides PADIC_LOG_LEVEL.")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="p-adic polynomial regression.")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parent = _shared_flags()
    subparsers.add_parser("gen", parents=[parent], help="Generate a planted dataset.")
    subparsers.add_parser("fit", parents=[parent], help="Fit a model (exact or stochastic).")
    subparsers.add_parser("predict", parents=[parent], help="Evaluate a model at points.")
    subparsers.add_parser("eval", parents=[parent], help="Report exact losses per partition.")
    subparsers.add_parser("inspect", parents=[parent], help="Summarize a dataset or model file.")
    return parser


def build_command_config(args: argparse.Namespace, settings: Settings) -> CommandConfig:
    values = {
        key: value
        for key, value in vars(args).items()
        if value is not None and key != "log_level"
    }
    values.setdefault("working_digits", settings.working_digits)
    values.setdefault("guard_digits", settings.guard_digits)
    values.setdefault("seed", settings.default_seed)
    if "point" in values:
        values["point"] = tuple(values["point"])
    return CommandConfig(**values)


def run(args: argparse.Namespace, settings: Settings) -> int:
    try:
        config = build_command_config(args, settings)
        output = HANDLERS[config.command](config)
    except USAGE_ERRORS as exc:
        logger.error("Usage error: %s", exc)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        logger.error("Data error: %s", exc)
        return EXIT_DATA
    except PAdicError as exc:
        logger.error("Numeric failure: %s", exc)
        return EXIT_NUMERIC
    sys.stdout.write(output)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (None, 0) else EXIT_USAGE

    try:
        settings = get_settings()
    except ConfigurationError as exc:
        logging.basicConfig(level=logging.INFO, stream=sys.stderr)
        logger.error("%s", exc)
        return EXIT_USAGE

    level = (args.log_level or settings.log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logger.info("%s %s: %s", APP_NAME, VERSION, args.command)
    return run(args, settings)


if __name__ == "__main__":
    sys.exit(main())

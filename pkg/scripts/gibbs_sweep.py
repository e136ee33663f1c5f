"""
Sweep beta for the exact Gibbs step expectation of a model on a dataset.

Enumerates the truncated weight lattice around the model's weights and prints,
per beta, E[L(w + xi)] next to L(w) and whether the step is expected to improve.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from padic_regress.config import get_settings
from padic_regress.constants import DEFAULT_ORACLE_TRUNCATION_DIGITS
from padic_regress.services.dataset_io import load_dataset
from padic_regress.services.gibbs_oracle import GibbsOracle, beta_sweep
from padic_regress.services.regression import load_model

logger = logging.getLogger(__name__)


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Exact Gibbs expectation over a beta grid.")
    parser.add_argument("--in", dest="input_path", type=Path, required=True, help="Dataset file.")
    parser.add_argument("--model", dest="model_path", type=Path, required=True, help="Model file.")
    parser.add_argument(
        "--truncation",
        type=int,
        default=DEFAULT_ORACLE_TRUNCATION_DIGITS,
        help=f"Lattice depth t (default: {DEFAULT_ORACLE_TRUNCATION_DIGITS})",
    )
    return parser.parse_args()


def main() -> None:
    logging.basicConfig(level=logging.INFO)
    args = parse_args()
    settings = get_settings()

    logger.info("Sweeping %s against %s (t=%d)", args.model_path, args.input_path, args.truncation)
    data = load_dataset(args.input_path, settings.guard_digits)
    model = load_model(args.model_path, settings.guard_digits)
    oracle = GibbsOracle.from_dataset(
        data,
        model.weights,
        args.truncation,
        data.policy(settings.guard_digits),
        settings.oracle_max_lattice,
    )
    print(f"L(w)={oracle.current_loss} improving_measure={oracle.improving_measure} points={oracle.size}")
    for result in beta_sweep(oracle):
        print(
            f"beta={result.beta:.4g} expectation={result.expectation:.12g} "
            f"log_normalizer={result.log_normalizer:.6g} improves={result.decreases}"
        )


if __name__ == "__main__":
    main()

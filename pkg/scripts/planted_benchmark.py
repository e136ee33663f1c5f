"""
Run the stochastic trainer on a planted consistent dataset over several seeds.

Prints one line per seed with the best training loss, and a summary of how many
seeds reached the loss threshold p^-threshold.
"""

from __future__ import annotations

import argparse
import logging
import time
from fractions import Fraction

from padic_regress.config import get_settings
from padic_regress.models.trainer import TrainerConfig
from padic_regress.services.padic import PrecisionPolicy
from padic_regress.services.targets import TargetSpec, generate
from padic_regress.services.training import fit_stochastic

DEFAULT_TARGET = "mahler:1,2,3,1"

logger = logging.getLogger(__name__)


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Planted-model benchmark for the stochastic trainer.")
    parser.add_argument("--p", dest="prime", type=int, default=2, help="Prime (default: 2)")
    parser.add_argument("--n", dest="dimension", type=int, default=2, help="Input dimension (default: 2)")
    parser.add_argument("--N", dest="count", type=int, default=12, help="Records (default: 12)")
    parser.add_argument("--M", dest="working_digits", type=int, default=16, help="Working digits (default: 16)")
    parser.add_argument(
        "--target",
        default=DEFAULT_TARGET,
        help=f"Planted Mahler target; its length sets K (default: {DEFAULT_TARGET})",
    )
    parser.add_argument("--steps", type=int, default=20_000, help="Walk steps per seed (default: 20000)")
    parser.add_argument("--seeds", type=int, default=5, help="Number of seeds 0..S-1 (default: 5)")
    parser.add_argument(
        "--threshold",
        type=int,
        default=2,
        help="Success when the best loss is <= p^-threshold (default: 2)",
    )
    parser.add_argument("--data-seed", type=int, default=1, help="Seed for the planted dataset (default: 1)")
    return parser.parse_args()


def main() -> None:
    logging.basicConfig(level=logging.INFO)
    args = parse_args()
    settings = get_settings()

    spec = TargetSpec.parse(args.target)
    policy = PrecisionPolicy(args.working_digits, settings.guard_digits)
    data = generate(
        spec, args.dimension, args.count, args.prime, args.working_digits, args.data_seed, policy.guard_digits
    )
    degree = len(spec.mahler_weights) - 1
    logger.info("Planted %s on %d records, K=%d, %d seeds", spec.to_text(), len(data), degree, args.seeds)
    threshold = Fraction(1, args.prime**args.threshold)

    successes = 0
    for seed in range(args.seeds):
        started = time.perf_counter()
        report = fit_stochastic(
            data, TrainerConfig(degree=degree, steps=args.steps, seed=seed), policy
        )
        best = report.final_loss.value
        successes += best <= threshold
        print(
            f"seed={seed} best={best.numerator}/{best.denominator} "
            f"accepted={report.accepted_moves} seconds={time.perf_counter() - started:.2f}"
        )
    print(f"reached <= {threshold}: {successes}/{args.seeds}")


if __name__ == "__main__":
    main()

"""
Exact Gibbs step expectation by enumerating a truncated weight lattice.

For weights w, the proposal xi ranges over {0, ..., p^t - 1}^(K+1) with uniform
mass (Haar measure on Z_p^(K+1) seen at depth t). With dL(xi) = L(w + xi) - L(w):

    N(beta)     = mean exp(-beta dL)
    E[L(w+xi)]  = L(w) - N'(beta) / N(beta)

Normalizers are handled in log space so large beta stays finite.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from padic_regress.constants import DEFAULT_ORACLE_MAX_LATTICE
from padic_regress.models.trainer import TrainerConfig
from padic_regress.services.dataset_io import Dataset, Partition
from padic_regress.services.loss_lattice import LatticeLoss
from padic_regress.services.padic import PAdicNumber, PrecisionPolicy
from padic_regress.services.training import build_design_matrix

logger = logging.getLogger(__name__)

DEFAULT_BETA_GRID = tuple(float(b) for b in np.logspace(-2, 6, 41))


class LatticeTooLargeError(ValueError):
    """Raised when the enumeration lattice exceeds the configured size."""


@dataclass(frozen=True, slots=True)
class GibbsExpectation:
    beta: float
    current_loss: Fraction
    expectation: float
    log_normalizer: float
    derivative_ratio: float
    improving_measure: Fraction

    @property
    def decreases(self) -> bool:
        return self.derivative_ratio > 0


class GibbsOracle:
    def __init__(
        self,
        lattice: LatticeLoss,
        weights: Sequence[int],
        truncation_digits: int,
        max_points: int = DEFAULT_ORACLE_MAX_LATTICE,
    ) -> None:
        if truncation_digits < 1:
            raise ValueError(f"truncation_digits must be >= 1, got {truncation_digits}")
        side = lattice.prime**truncation_digits
        size = side**lattice.width
        if size > max_points:
            raise LatticeTooLargeError(
                f"lattice of {size} points exceeds the limit of {max_points} "
                f"(p={lattice.prime}, K+1={lattice.width}, t={truncation_digits})"
            )
        self.lattice = lattice
        self.weights = tuple(weights)
        self.truncation_digits = truncation_digits
        self.size = size

        base = lattice.residuals(self.weights)
        self.current_total = lattice.total_of(base)
        self.totals = [
            lattice.total_of(lattice.shift_residuals(base, xi))
            for xi in itertools.product(range(side), repeat=lattice.width)
        ]
        self._deltas = np.array(
            [float(lattice.value(total - self.current_total)) for total in self.totals]
        )
        logger.debug("Enumerated %d lattice points, L(w)=%s", size, self.current_loss)

    @classmethod
    def from_dataset(
        cls,
        data: Dataset,
        weights: Sequence[PAdicNumber],
        truncation_digits: int,
        policy: PrecisionPolicy | None = None,
        max_points: int = DEFAULT_ORACLE_MAX_LATTICE,
    ) -> GibbsOracle:
        policy = policy or data.policy()
        records = data.records_for(Partition.TRAIN)
        matrix = build_design_matrix(data, len(weights) - 1, Partition.TRAIN, policy)
        lattice = LatticeLoss.from_design(matrix, [r.y for r in records], policy.working_digits)
        return cls(lattice, lattice.from_padic(weights), truncation_digits, max_points)

    @property
    def current_loss(self) -> Fraction:
        return self.lattice.value(self.current_total)

    @property
    def improving_measure(self) -> Fraction:
        """Haar measure of the improving set {xi : L(w + xi) < L(w)}."""
        return Fraction(sum(1 for t in self.totals if t < self.current_total), self.size)

    def mean_loss(self) -> Fraction:
        """Plain lattice average of L(w + xi), the beta -> 0 limit."""
        return self.lattice.value(sum(self.totals)) / self.size

    def log_normalizer(self, beta: float) -> float:
        exponents = -beta * self._deltas
        peak = float(exponents.max())
        return peak + math.log(float(np.mean(np.exp(exponents - peak))))

    def expectation(self, beta: float) -> GibbsExpectation:
        if beta < 0:
            raise ValueError(f"beta must be >= 0, got {beta}")
        exponents = -beta * self._deltas
        peak = float(exponents.max())
        weights = np.exp(exponents - peak)
        mean_delta = float(np.dot(weights, self._deltas) / weights.sum())
        return GibbsExpectation(
            beta=beta,
            current_loss=self.current_loss,
            expectation=float(self.current_loss) + mean_delta,
            log_normalizer=peak + math.log(float(weights.mean())),
            derivative_ratio=-mean_delta,
            improving_measure=self.improving_measure,
        )


def gibbs_oracle_step_expectation(
    weights: Sequence[PAdicNumber],
    beta: float,
    data: Dataset,
    truncation_digits: int,
    policy: PrecisionPolicy | None = None,
    max_points: int = DEFAULT_ORACLE_MAX_LATTICE,
) -> GibbsExpectation:
    oracle = GibbsOracle.from_dataset(data, weights, truncation_digits, policy, max_points)
    return oracle.expectation(beta)


def walk_step_expectation(
    weights: Sequence[PAdicNumber],
    step: int,
    data: Dataset,
    config: TrainerConfig,
    policy: PrecisionPolicy | None = None,
    max_points: int = DEFAULT_ORACLE_MAX_LATTICE,
) -> GibbsExpectation:
    """Expectation at the walk's `step`, with beta and depth t taken from the trainer config."""
    if len(weights) != config.degree + 1:
        raise ValueError(f"config expects {config.degree + 1} weights, got {len(weights)}")
    return gibbs_oracle_step_expectation(
        weights, config.beta(step), data, config.truncation_digits, policy, max_points
    )


def beta_sweep(oracle: GibbsOracle, betas: Iterable[float] = DEFAULT_BETA_GRID) -> list[GibbsExpectation]:
    results = [oracle.expectation(beta) for beta in betas]
    dropping = [r.beta for r in results if r.decreases]
    if dropping:
        logger.info("Expected loss drops for beta in [%.3g, %.3g]", min(dropping), max(dropping))
    else:
        logger.info("Expected loss never drops below L(w)=%s on the sweep", oracle.current_loss)
    return results

"""
Weight fitting: exact interpolation when K = N - 1, the integrality certificate
for that solution, and a seeded Metropolis walk for any K.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from padic_regress.models.trainer import TrainerConfig
from padic_regress.services.dataset_io import Dataset, Partition, Record
from padic_regress.services.embedding import interleave
from padic_regress.services.linalg import PAdicMatrix, SingularMatrixError, det_norm, solve_linear
from padic_regress.services.loss_lattice import LatticeLoss
from padic_regress.services.mahler import omega_values
from padic_regress.services.padic import (
    NotIntegralError,
    PAdicError,
    PAdicNumber,
    PrecisionExhaustedError,
    PrecisionPolicy,
    integer_from_digits,
)
from padic_regress.services.regression import (
    EmptyPartitionError,
    LossValue,
    RegressionModel,
    loss,
    residuals,
)

logger = logging.getLogger(__name__)


class InconsistentSystemError(PAdicError):
    """Raised when two training records share an interleaved input but not a label."""


class ExactFitShapeError(ValueError):
    """Raised when an exact fit is requested with K != N_train - 1."""


class FitMode(str, Enum):
    EXACT = "exact"
    STOCHASTIC = "stochastic"


@dataclass(frozen=True, slots=True)
class FitReport:
    mode: FitMode
    model: RegressionModel
    trajectory: tuple[Fraction, ...]
    final_loss: LossValue
    integral: bool
    config: tuple[tuple[str, str], ...] = ()
    det_norm: Fraction | None = None
    residual_norms: tuple[Fraction, ...] = ()
    certificate: bool | None = None
    chain: int | None = None
    accepted_moves: int = 0


@dataclass(slots=True)
class _ChainResult:
    index: int
    best_weights: tuple[int, ...]
    best_total: int
    totals: list[int] = field(default_factory=list)
    accepted: int = 0


def _train_records(data: Dataset) -> tuple[Record, ...]:
    records = data.records_for(Partition.TRAIN)
    if not records:
        raise EmptyPartitionError("training partition has no records")
    return records


def build_design_matrix(
    data: Dataset,
    degree: int,
    partition: Partition = Partition.TRAIN,
    policy: PrecisionPolicy | None = None,
) -> PAdicMatrix:
    """Rows a, columns k: omega_k(interleave(x_a))."""
    records = data.records_for(partition)
    if not records:
        raise EmptyPartitionError(f"partition {partition.value!r} has no records")
    policy = policy or data.policy()
    return PAdicMatrix.from_rows(
        [list(omega_values(degree, interleave(record.x), policy)) for record in records]
    )


def _check_consistent(records: Sequence[Record]) -> None:
    nodes = [interleave(record.x) for record in records]
    for b in range(len(records)):
        for a in range(b):
            if nodes[a].congruent(nodes[b]) and not records[a].y.congruent(records[b].y):
                raise InconsistentSystemError(
                    f"training records {a} and {b} share an interleaved input but not a label"
                )


def check_integrality(
    candidate: Sequence[PAdicNumber],
    data: Dataset,
    matrix_norm: Fraction,
    policy: PrecisionPolicy | None = None,
) -> bool:
    """
    Whether |l(candidate)|_p <= |A|_p^2 on the training records.

    When it holds the exact interpolant lies in Z_p^N. Residuals that vanish at
    working precision count as 0 here.
    """
    if any(not w.is_integral for w in candidate):
        raise NotIntegralError("certificate candidate must lie in Z_p^N")
    records = _train_records(data)
    witness = RegressionModel(data.prime, data.dimension, tuple(candidate), data.working_digits)
    largest = max(
        (Fraction(0) if value.norm_is_bound else value.norm())
        for value in residuals(witness, records, policy)
    )
    return largest <= matrix_norm**2


def fit_exact(
    data: Dataset, degree: int | None = None, policy: PrecisionPolicy | None = None
) -> FitReport:
    records = _train_records(data)
    count = len(records)
    if degree is not None and degree != count - 1:
        raise ExactFitShapeError(
            f"exact fit needs K = N_train - 1 = {count - 1}, got K = {degree}"
        )
    policy = policy or data.policy()
    _check_consistent(records)

    matrix = build_design_matrix(data, count - 1, Partition.TRAIN, policy)
    labels = [record.y for record in records]
    weights = solve_linear(matrix, labels)
    matrix_norm = det_norm(matrix)
    model = RegressionModel(data.prime, data.dimension, weights, data.working_digits)

    witness = tuple(w.integral_part() for w in weights)
    certificate = check_integrality(witness, data, matrix_norm, policy)
    integral = model.is_integral
    if certificate and not integral:
        logger.error("Integrality certificate passed but the solution leaves Z_p^N")
    elif integral and not certificate:
        logger.warning(
            "Solution lies in Z_p^N although the certificate fails (|A|_p = %s)", matrix_norm
        )

    final_loss = loss(model, data, Partition.TRAIN, policy)
    logger.info(
        "Exact fit: N=%d |A|_p=%s integral=%s certificate=%s", count, matrix_norm, integral, certificate
    )
    return FitReport(
        mode=FitMode.EXACT,
        model=model,
        trajectory=(final_loss.value,),
        final_loss=final_loss,
        integral=integral,
        config=(
            ("mode", FitMode.EXACT.value),
            ("degree", str(count - 1)),
            ("working_digits", str(policy.working_digits)),
            ("guard_digits", str(policy.guard_digits)),
        ),
        det_norm=matrix_norm,
        residual_norms=tuple(value.norm() for value in residuals(model, records, policy)),
        certificate=certificate,
    )


def _warm_start(
    records: Sequence[Record],
    matrix: PAdicMatrix,
    lattice: LatticeLoss,
) -> tuple[int, ...]:
    """Exact sub-fit on the first K+1 records with distinct interleaved inputs."""
    width = matrix.cols
    zero = (0,) * width
    nodes: list[PAdicNumber] = []
    chosen: list[int] = []
    for index, record in enumerate(records):
        node = interleave(record.x)
        if any(node.congruent(seen) for seen in nodes):
            continue
        nodes.append(node)
        chosen.append(index)
        if len(chosen) == width:
            break
    if len(chosen) < width:
        logger.warning("Warm start needs %d distinct inputs, found %d; starting at 0", width, len(chosen))
        return zero
    try:
        weights = solve_linear(
            PAdicMatrix.from_rows([list(matrix.row(i)) for i in chosen]),
            [records[i].y for i in chosen],
        )
    except (SingularMatrixError, PrecisionExhaustedError) as exc:
        logger.warning("Warm start sub-fit failed (%s); starting at 0", exc)
        return zero
    return lattice.from_padic([w.integral_part() for w in weights])


def _run_chain(
    lattice: LatticeLoss,
    initial: tuple[int, ...],
    config: TrainerConfig,
    seed: np.random.SeedSequence,
    index: int,
) -> _ChainResult:
    rng = np.random.default_rng(seed)
    prime = lattice.prime
    digits = lattice.digits
    modulus = lattice.modulus
    width = lattice.width

    weights = list(initial)
    current = lattice.residuals(weights)
    total = lattice.total_of(current)
    result = _ChainResult(index, tuple(weights), total, [total])
    milestone = max(1, config.steps // 10)

    for i in range(config.steps):
        beta = config.beta(i)
        radius = min(int(rng.geometric(1.0 - config.radius_q)) - 1, digits - 1)
        draws = rng.integers(0, prime, size=(width, digits - radius))
        step = [integer_from_digits(row, prime) * prime**radius for row in draws]

        proposed = lattice.shift_residuals(current, step)
        proposed_total = lattice.total_of(proposed)
        delta = proposed_total - total
        accept = delta <= 0 or beta == 0
        if not accept:
            u = rng.random()
            accept = u == 0.0 or math.log(u) < -beta * delta / lattice.denominator
        if accept:
            weights = [(w + s) % modulus for w, s in zip(weights, step)]
            current, total = proposed, proposed_total
            result.accepted += 1
            if total < result.best_total:
                result.best_total = total
                result.best_weights = tuple(weights)
        result.totals.append(result.best_total)
        if (i + 1) % milestone == 0:
            logger.debug(
                "chain %d step %d beta=%.4g best=%s", index, i + 1, beta, lattice.value(result.best_total)
            )
    return result


def fit_stochastic(
    data: Dataset, config: TrainerConfig, policy: PrecisionPolicy | None = None
) -> FitReport:
    """
    Best-so-far weights of a Metropolis walk on Z_p^(K+1) truncated to p^M.

    Each chain draws from its own child of SeedSequence(config.seed); the chain
    with the lowest best loss wins, ties going to the lower chain index.
    """
    records = _train_records(data)
    policy = policy or data.policy()
    matrix = build_design_matrix(data, config.degree, Partition.TRAIN, policy)
    lattice = LatticeLoss.from_design(matrix, [r.y for r in records], policy.working_digits)

    initial = _warm_start(records, matrix, lattice) if config.warm_start else (0,) * lattice.width
    seeds = np.random.SeedSequence(config.seed).spawn(config.chains)
    if config.chains == 1:
        results = [_run_chain(lattice, initial, config, seeds[0], 0)]
    else:
        workers = min(config.chains, os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda pair: _run_chain(lattice, initial, config, pair[1], pair[0]),
                    enumerate(seeds),
                )
            )
    for result in results:
        logger.info(
            "Chain %d finished: best=%s accepted=%d/%d",
            result.index,
            lattice.value(result.best_total),
            result.accepted,
            config.steps,
        )
    best = min(results, key=lambda r: (r.best_total, r.index))

    model = RegressionModel(
        data.prime, data.dimension, lattice.to_padic(best.best_weights), data.working_digits
    )
    final_loss = loss(model, data, Partition.TRAIN, policy)
    logger.info("Stochastic fit: K=%d best train loss %s (chain %d)", config.degree, final_loss, best.index)
    return FitReport(
        mode=FitMode.STOCHASTIC,
        model=model,
        trajectory=tuple(lattice.value(t) for t in best.totals),
        final_loss=final_loss,
        integral=model.is_integral,
        config=(("mode", FitMode.STOCHASTIC.value),)
        + config.echo()
        + (("working_digits", str(policy.working_digits)), ("guard_digits", str(policy.guard_digits))),
        chain=best.index,
        accepted_moves=best.accepted,
    )

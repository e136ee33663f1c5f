from __future__ import annotations

import logging
import math
from fractions import Fraction

import pytest
from pydantic import ValidationError

from padic_regress.models.trainer import TrainerConfig
from padic_regress.services import training
from padic_regress.services.dataset_io import Partition
from padic_regress.services.linalg import SingularMatrixError, det_norm
from padic_regress.services.padic import PrecisionPolicy, from_integer
from padic_regress.services.regression import EmptyPartitionError, RegressionModel
from padic_regress.services.targets import TargetFamily, TargetSpec, generate
from padic_regress.services.training import (
    ExactFitShapeError,
    FitMode,
    InconsistentSystemError,
    build_design_matrix,
    check_integrality,
    fit_exact,
    fit_stochastic,
)

WIDE = PrecisionPolicy(32, 24)
SMALL = PrecisionPolicy(16, 16)


def _distinct_points(pyrng, count, prime=3, dimension=2, span=3**10):
    points: set[tuple[int, ...]] = set()
    while len(points) < count:
        points.add(tuple(pyrng.randrange(span) for _ in range(dimension)))
    return [list(point) for point in points]


def _planted_rows(weights, points, prime, policy):
    model = RegressionModel.from_integers(weights, prime, len(points[0]), policy)
    target = TargetSpec(TargetFamily.MAHLER, mahler_weights=tuple(weights))
    rows = [(coords, target.exact_label(coords, prime, policy.total_digits)) for coords in points]
    return model, rows


def test_design_matrix_rows_are_binomials(make_dataset, policy):
    data = make_dataset([([0], 4), ([1], 5), ([2], 6)], 3, policy)
    matrix = build_design_matrix(data, 2, Partition.TRAIN, policy)
    rows = [[matrix[i, k].to_integer() for k in range(3)] for i in range(3)]
    assert rows == [[1, 0, 0], [1, 1, 0], [1, 2, 1]]


def test_exact_fit_recovers_planted_weights(make_dataset, pyrng):
    bound = Fraction(1, 3 ** (WIDE.working_digits - WIDE.guard_digits))
    for instance in range(100):
        count = 2 + instance % 7
        weights = [pyrng.randrange(100) for _ in range(count)]
        _, rows = _planted_rows(weights, _distinct_points(pyrng, count), 3, WIDE)
        data = make_dataset(rows, 3, WIDE)

        report = fit_exact(data, count - 1, WIDE)

        assert report.mode is FitMode.EXACT
        assert report.integral
        assert all(norm <= bound for norm in report.residual_norms)
        for fitted, planted in zip(report.model.weights, weights):
            assert fitted.congruent(from_integer(planted, 3, WIDE))
        assert report.final_loss.value == 0


def test_certificate_implies_integral_solution(make_dataset, pyrng):
    passes = 0
    for instance in range(100):
        count = pyrng.randint(2, 5)
        weights = [pyrng.randrange(50) for _ in range(count)]
        planted, rows = _planted_rows(weights, _distinct_points(pyrng, count), 3, WIDE)
        if instance % 3:
            rows = [
                (coords, label + 3 ** pyrng.randint(1, 4) * pyrng.randint(1, 8)) for coords, label in rows
            ]
        data = make_dataset(rows, 3, WIDE)
        matrix_norm = det_norm(build_design_matrix(data, count - 1, Partition.TRAIN, WIDE))

        if check_integrality(planted.weights, data, matrix_norm, WIDE):
            passes += 1
            assert fit_exact(data, count - 1, WIDE).integral
    assert passes >= 20


def test_exact_fit_shape_and_consistency_errors(make_dataset, policy):
    data = make_dataset([([0, 1], 1), ([2, 3], 2), ([4, 5], 3)], 3, policy)
    with pytest.raises(ExactFitShapeError):
        fit_exact(data, 1, policy)

    clash = make_dataset([([0, 1], 1), ([0, 1], 2)], 3, policy)
    with pytest.raises(InconsistentSystemError):
        fit_exact(clash, None, policy)

    duplicate = make_dataset([([0, 1], 1), ([0, 1], 1)], 3, policy)
    with pytest.raises(SingularMatrixError):
        fit_exact(duplicate, None, policy)


def test_integral_solution_without_certificate_is_logged(make_dataset, policy, monkeypatch, caplog):
    data = make_dataset([([0], 5), ([1], 8), ([2], 11)], 5, policy)
    monkeypatch.setattr(training, "check_integrality", lambda *args, **kwargs: False)
    with caplog.at_level(logging.WARNING, logger=training.__name__):
        report = fit_exact(data, None, policy)
    assert report.integral
    assert not report.certificate
    warnings = [r for r in caplog.records if r.levelno == logging.WARNING]
    assert any("certificate fails" in r.getMessage() for r in warnings)


def test_walk_never_beats_the_exact_fit_on_square_systems(make_dataset):
    _, rows = _planted_rows([3, 1, 4, 1], [[a, 2 * a + 1] for a in range(4)], 2, SMALL)
    data = make_dataset(rows, 2, SMALL)
    exact = fit_exact(data, 3, SMALL)
    assert exact.final_loss.value == 0
    for seed in range(3):
        report = fit_stochastic(data, TrainerConfig(degree=3, steps=500, seed=seed), SMALL)
        assert report.final_loss.value >= exact.final_loss.value
        assert min(report.trajectory) >= exact.final_loss.value


def test_fit_needs_training_records(make_dataset, policy):
    data = make_dataset([([0], 1)], 3, policy, [Partition.VALIDATION])
    with pytest.raises(EmptyPartitionError):
        fit_exact(data, None, policy)
    with pytest.raises(EmptyPartitionError):
        fit_stochastic(data, TrainerConfig(degree=0, steps=1), policy)


def test_exact_fit_report_fields(make_dataset, policy):
    data = make_dataset([([0], 5), ([1], 8), ([2], 11)], 5, policy)
    report = fit_exact(data, None, policy)
    assert [w.to_integer() for w in report.model.weights] == [5, 3, 0]
    assert report.certificate
    assert report.det_norm == 1
    assert report.trajectory == (Fraction(0),)
    assert dict(report.config)["degree"] == "2"


def test_trainer_config_validation_and_schedule():
    config = TrainerConfig(degree=1, beta0=2.0, beta_growth=1.5)
    assert config.beta(0) == 2.0
    assert config.beta(2) == pytest.approx(4.5)
    assert TrainerConfig(degree=0, beta_growth=10.0).beta(10**6) == math.inf
    assert TrainerConfig(degree=0, beta0=0.0, beta_growth=10.0).beta(10**6) == 0.0
    for bad in ({"radius_q": 1.0}, {"beta_growth": 0.5}, {"chains": 0}, {"degree": -1}, {"seed": -3}):
        with pytest.raises(ValidationError):
            TrainerConfig(**{"degree": 1, **bad})


def test_zero_steps_returns_the_start(make_dataset):
    data = make_dataset([([a, a + 1], a * 7 + 1) for a in range(5)], 2, SMALL)
    report = fit_stochastic(data, TrainerConfig(degree=2, steps=0), SMALL)
    assert report.mode is FitMode.STOCHASTIC
    assert len(report.trajectory) == 1
    assert all(w.is_zero for w in report.model.weights)
    assert report.accepted_moves == 0
    assert report.trajectory[0] == report.final_loss.value


def test_blind_search_accepts_every_move(make_dataset):
    data = make_dataset([([a, a + 1], a * 7 + 1) for a in range(5)], 2, SMALL)
    report = fit_stochastic(data, TrainerConfig(degree=2, steps=300, beta0=0.0), SMALL)
    assert report.accepted_moves == 300
    assert len(report.trajectory) == 301


def test_warm_start_lands_on_the_sub_fit(make_dataset):
    data = make_dataset([([x], 5 + 3 * x) for x in range(4)], 3, SMALL)
    report = fit_stochastic(data, TrainerConfig(degree=1, steps=0, warm_start=True), SMALL)
    assert report.final_loss.value == 0
    assert [w.to_integer() for w in report.model.weights] == [5, 3]


def test_warm_start_falls_back_to_zero(make_dataset, caplog):
    data = make_dataset([([0], 1), ([0], 1), ([1], 2)], 3, SMALL)
    with caplog.at_level(logging.WARNING):
        report = fit_stochastic(data, TrainerConfig(degree=2, steps=0, warm_start=True), SMALL)
    assert all(w.is_zero for w in report.model.weights)
    assert "Warm start" in caplog.text


def _planted_walk_data():
    return generate(TargetSpec.parse("mahler:1,2,3,1"), 2, 12, 2, 16, seed=11, guard_digits=16)


def test_walk_reaches_the_planted_basin():
    data = _planted_walk_data()
    hits = 0
    for seed in range(5):
        report = fit_stochastic(data, TrainerConfig(degree=3, steps=20_000, seed=seed), SMALL)
        trajectory = report.trajectory
        assert len(trajectory) == 20_001
        assert all(later <= earlier for earlier, later in zip(trajectory, trajectory[1:]))
        assert report.final_loss.value == trajectory[-1]
        if trajectory[-1] <= Fraction(1, 4):
            hits += 1
    assert hits >= 4


def test_reruns_are_identical():
    data = _planted_walk_data()
    config = TrainerConfig(degree=3, steps=2_000, seed=7, chains=3)
    first = fit_stochastic(data, config, SMALL)
    second = fit_stochastic(data, config, SMALL)
    assert first.trajectory == second.trajectory
    assert first.chain == second.chain
    assert first.chain in range(3)
    assert first.accepted_moves == second.accepted_moves
    assert [w.to_integer() for w in first.model.weights] == [w.to_integer() for w in second.model.weights]

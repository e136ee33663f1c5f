from __future__ import annotations

import pytest

from padic_regress.services.dataset_io import Partition
from padic_regress.services.embedding import PointND, interleave
from padic_regress.services.padic import PAdicNumber, PrecisionPolicy, from_integer
from padic_regress.services.regression import loss, residual
from padic_regress.services.targets import NoiseSpec, TargetFamily, TargetSpec, generate


def test_constant_and_identity_mahler_targets(policy):
    x = PointND.from_integers([1, 2], 3, policy)
    assert TargetSpec.parse("mahler:6").evaluate(x, policy).to_integer() == 6
    assert TargetSpec.parse("mahler:0,1").evaluate(x, policy).congruent(interleave(x))


def test_polynomial_target(policy):
    spec = TargetSpec.parse("poly:3:1,1|1:0,2")
    assert spec.family is TargetFamily.POLYNOMIAL
    x = PointND.from_integers([2, 5], 7, policy)
    assert spec.evaluate(x, policy).to_integer() == 3 * 2 * 5 + 25
    assert TargetSpec.parse("poly:1:1,1").evaluate(PointND.from_integers([1, 1], 2, policy), policy).to_text() == "p^0 * 1"
    two = TargetSpec.parse("poly:1:1,0|1:0,1").evaluate(PointND.from_integers([1, 1], 2, policy), policy)
    assert two.to_text() == "p^1 * 1"


def test_digit_tables(policy):
    x = PointND.from_integers([3, 1], 3, policy)
    identity = TargetSpec.parse("digits:0,1,2")
    assert identity.evaluate(x, policy).congruent(interleave(x))

    swapped = TargetSpec.parse("digits:1,0,2")
    zero = PointND.from_integers([0, 0], 2, policy)
    assert TargetSpec.parse("digits:1,0").evaluate(zero, policy).congruent(from_integer(-1, 2, policy))
    assert swapped.evaluate(PointND.from_integers([0], 3, policy), policy).congruent(
        from_integer((3**policy.total_digits - 1) // 2, 3, policy)
    )


def test_validate_rejects_shape_mismatches():
    with pytest.raises(ValueError):
        TargetSpec.parse("poly:1:1,2,3").validate(3, 2)
    with pytest.raises(ValueError):
        TargetSpec.parse("digits:0,1").validate(3, 1)
    with pytest.raises(ValueError):
        TargetSpec.parse("digits:0,1,3").validate(3, 1)


@pytest.mark.parametrize("text", ["", "fourier:1,2", "mahler:", "mahler:a,b", "poly:", "poly:1:-1,0"])
def test_bad_target_specs(text):
    with pytest.raises(ValueError):
        TargetSpec.parse(text)


@pytest.mark.parametrize("text", ["2", "0:0.5", "2:1.5", "x:y"])
def test_bad_noise_specs(text):
    with pytest.raises(ValueError):
        NoiseSpec.parse(text)


def test_spec_text_is_stable():
    for text in ("mahler:1,2,0,1", "poly:3:1,1|1:0,2", "digits:1,0,2"):
        assert TargetSpec.parse(text).to_text() == text
    assert NoiseSpec.parse("2:0.25").to_text() == "2:0.25"


def test_generation_is_deterministic():
    spec = TargetSpec.parse("mahler:1,2,3")
    first = generate(spec, 2, 12, 3, 10, seed=4)
    assert first == generate(spec, 2, 12, 3, 10, seed=4)
    assert first != generate(spec, 2, 12, 3, 10, seed=5)
    assert first.train_count == 12
    assert first.comments == ("target=mahler:1,2,3 seed=4 noise=off",)


def test_planted_target_has_zero_loss():
    spec = TargetSpec.parse("mahler:1,2,0,1")
    data = generate(spec, 2, 10, 3, 12, seed=8, guard_digits=16)
    policy = data.policy(16)
    value = loss(spec.planted_model(3, 2, policy), data, Partition.TRAIN, policy)
    assert value.value == 0
    assert value.bound_flag


def test_noise_lands_at_the_requested_valuation():
    policy = PrecisionPolicy(12, 16)
    spec = TargetSpec.parse("mahler:1,2,0,1", noise="2:1")
    data = generate(spec, 2, 20, 3, 12, seed=2, guard_digits=16)
    model = spec.planted_model(3, 2, policy)
    for record in data.records:
        assert residual(model, record.x, record.y, policy).valuation == 2


@pytest.mark.parametrize("text", ["mahler:1,2,0,1", "mahler:-3,0,5", "poly:3:1,1|-1:0,2", "digits:1,2,0"])
def test_exact_labels_agree_with_evaluation(text, policy, pyrng):
    spec = TargetSpec.parse(text)
    for _ in range(20):
        coords = [pyrng.randrange(3**8) for _ in range(2)]
        expected = spec.evaluate(PointND.from_integers(coords, 3, policy), policy)
        label = spec.exact_label(coords, 3, policy.total_digits)
        assert expected.congruent(PAdicNumber.from_residue(label, 3, policy.total_digits))

import math

import numpy as np
import pytest

from models.forms import synthetic_form
from models.petersson import (average_shape_report, default_c_max, delta_infty_residual,
                              delta_prime, delta_star_empirical, family_size_model,
                              sign_class_sizes, square_indicator, truncation_profile)
from utils.errors import DomainError


def test_square_indicator():
    assert square_indicator(9, 3) == 3
    assert square_indicator(9, 2) == 0
    assert square_indicator(8, 10) == 0
    assert square_indicator(1, 1) == 1


def test_main_term_for_squares():
    term = delta_prime(12, 1, 4, Y=2.0, c_max=50)
    assert term.main_term == pytest.approx(11 / 12 / 2)
    assert delta_prime(12, 1, 2, Y=2.0, c_max=50).main_term == 0.0
    assert delta_prime(2, 11, 1, c_max=110).main_term == pytest.approx(11 / 12)


def test_delta_prime_value_is_main_plus_tail():
    term = delta_prime(12, 1, 3, c_max=200)
    assert term.value == term.main_term + term.kloosterman_tail
    assert term.c_max == 200
    assert term.truncation_estimate > 0


def test_default_c_max():
    assert default_c_max(11, 4, 1.0) == 100 * 11 * 2
    assert delta_prime(12, 1, 1).c_max == 100


def test_truncation_estimate_nonincreasing():
    profile = truncation_profile(12, 11, 1, 1.0, [110, 1100, 11000])
    assert len(profile) == 3
    assert np.all(np.diff(profile) <= 0)


def test_level_conditions():
    with pytest.raises(DomainError):
        delta_prime(2, 11, 121)
    with pytest.raises(DomainError):
        delta_prime(2, 11, 1, c_max=5)
    with pytest.raises(DomainError):
        delta_prime(12, 1, 0)
    # n = N itself is allowed
    assert delta_prime(2, 11, 11, c_max=110).main_term == 0.0


def test_empirical_sums(delta):
    assert delta_star_empirical([delta], 2) == delta.lam(2)
    assert delta_star_empirical([], 2) == 0.0


def test_mixed_family_rejected(delta, level11, level1_family):
    with pytest.raises(DomainError):
        delta_star_empirical([delta, level11], 1)
    with pytest.raises(DomainError):
        sign_class_sizes(level1_family)


def test_residual_is_star_minus_prime(delta):
    residual = delta_infty_residual([delta], 1, c_max=100)
    expected = delta_star_empirical([delta], 1) - delta_prime(12, 1, 1, c_max=100).value
    assert residual == pytest.approx(expected)
    with pytest.raises(DomainError):
        delta_infty_residual([], 1)
    assert delta_infty_residual([], 1, c_max=100, kappa=12, N=1) == pytest.approx(
        -delta_prime(12, 1, 1, c_max=100).value)


def test_family_size_model():
    model, band = family_size_model(2, 101)
    assert model == pytest.approx(101 / 12)
    assert band == pytest.approx(202 ** (5 / 6))
    with pytest.raises(DomainError):
        family_size_model(12, 1)


def test_sign_classes_of_synthetic_family():
    family = [synthetic_form(101, 2, 200, seed=s, sign=(1 if s % 3 else -1)) for s in range(6)]
    sizes = sign_class_sizes(family)
    assert sizes['plus'] == 4 and sizes['minus'] == 2
    assert sizes['class_model'] == pytest.approx(101 / 24)
    assert 'band' in sizes


def test_sign_classes_level_one(delta):
    assert sign_class_sizes([delta]) == {'plus': 1, 'minus': 0}


def test_average_shape_report(delta):
    df = average_shape_report([delta], ns=(1, 2, 4), c_max=100)
    assert list(df['n']) == [1, 2, 4]
    assert list(df.columns) == ['n', 'lhs', 'rhs', 'margin']
    assert np.allclose(df['margin'], df['rhs'] - df['lhs'])
    with pytest.raises(DomainError):
        average_shape_report([])


def test_average_shape_skips_level_multiples():
    family = [synthetic_form(11, 2, 200, seed=s) for s in range(3)]
    df = average_shape_report(family, ns=(1, 11, 22, 3), c_max=11)
    assert list(df['n']) == [1, 3]
    assert math.isfinite(df['lhs'].iloc[0])

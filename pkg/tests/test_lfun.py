import cmath

import pytest

from models.forms import builtin_form
from models.lfun import (ALTERNATE_WIDTH, MAX_ABS_T, afe_value, central_value,
                         completed_lambda, dirichlet_partial, euler_product_log, fe_residuals,
                         l_value, required_terms)
from utils.errors import DomainError, RangeError


def test_level11_central_value(level11):
    # L(E, 1) for the elliptic curve 11a
    value = central_value(level11, 0.0)
    assert value.method == 'afe'
    assert value.value.real == pytest.approx(0.2538418608559107, abs=1e-8)
    assert abs(value.value.imag) < 1e-12
    assert value.trunc_error < 1e-8


def test_delta_central_value(delta):
    # L(Delta, 6) in the unitary normalization
    result = central_value(delta, 0.0)
    value = result.value
    assert value.real == pytest.approx(0.792122838, abs=1e-7)
    assert abs(value.imag) < 1e-12
    assert result.trunc_error < 1e-8
    other = central_value(delta, 0.0, width=ALTERNATE_WIDTH).value
    assert abs(other - value) < 1e-8


def test_odd_sign_central_value_vanishes():
    f = builtin_form('level1_weight18', 200)
    assert abs(central_value(f, 0.0).value) < 1e-10


@pytest.mark.parametrize("s", [complex(3, 0), complex(3, 5), complex(3.2, -2)])
def test_afe_agrees_with_dirichlet_series(delta, level11, s):
    for f in (delta, level11):
        afe = afe_value(f, s).value
        series = dirichlet_partial(f, s).value
        assert abs(afe - series) < 1e-6


def test_l_value_dispatch(delta):
    assert l_value(delta, 3.0).method == 'dirichlet'
    assert l_value(delta, complex(0.5, 1)).method == 'afe'


def test_euler_product_matches_series(delta):
    s = complex(3, 1)
    product = cmath.exp(euler_product_log(delta, s, 1999))
    assert abs(product - dirichlet_partial(delta, s).value) < 1e-6
    assert euler_product_log(delta, s, 1) == 0


def test_functional_equation_residuals(delta, level11):
    for f in (delta, level11):
        df = fe_residuals(f, [0.0, 1.0, 5.0])
        assert (df['margin'] >= 0).all()
        assert list(df['t']) == [0.0, 1.0, 5.0]


def test_completed_function_is_real_on_the_critical_line(delta):
    # Lambda(1/2 + it) is real for a self-dual form with epsilon = +1
    value = completed_lambda(delta, complex(0.5, 2.0)).lambda_value
    assert abs(value.imag) <= 1e-8 * max(1.0, abs(value))


def test_conjugate_symmetry(delta):
    up = central_value(delta, 3.0).value
    down = central_value(delta, -3.0).value
    assert up == pytest.approx(down.conjugate(), abs=1e-10)


def test_compensated_sums_agree(level11):
    plain = afe_value(level11, complex(0.5, 2.0)).value
    fsum = afe_value(level11, complex(0.5, 2.0), compensated=True).value
    assert abs(plain - fsum) < 1e-12


def test_domain_errors(delta, level11):
    with pytest.raises(DomainError):
        dirichlet_partial(delta, 1.0)
    with pytest.raises(DomainError):
        euler_product_log(delta, 0.5, 100)
    with pytest.raises(DomainError):
        afe_value(delta, complex(0.5, MAX_ABS_T + 1))
    with pytest.raises(DomainError):
        afe_value(delta, 0.5, width=0)
    # Gamma(1 - s + 1/2) has a pole at s = 3/2
    with pytest.raises(DomainError):
        afe_value(level11, 1.5)


def test_insufficient_coefficients(delta):
    assert required_terms(delta, 100.0) > delta.n_max
    with pytest.raises(RangeError) as excinfo:
        central_value(delta, 100.0)
    assert excinfo.value.required == required_terms(delta, 100.0)
    with pytest.raises(RangeError):
        dirichlet_partial(delta, 2.0, n_max=delta.n_max + 1)

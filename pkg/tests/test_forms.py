import math
from fractions import Fraction

import numpy as np
import pytest

from models.forms import (BUILTIN_SETS, bernoulli, builtin_family, builtin_form, deligne_margins,
                          hecke_product, load_coefficients, power_expansion,
                          power_expansion_terms, prime_frame, prime_power_eigenvalue, root_number,
                          synthetic_form, validate_sequence, write_coefficients)
from utils.errors import DataError, DomainError, RangeError
from utils.file_parser import write_coefficient_file


def test_delta_eigenvalues(delta):
    assert delta.lam(1) == 1.0
    assert delta.lam(2) == pytest.approx(-24 / 2**5.5, abs=1e-15)
    assert delta.lam(2) == pytest.approx(-0.530330, abs=1e-6)
    assert delta.lam(3) == pytest.approx(252 / 3**5.5, abs=1e-15)


def test_level11_eigenvalues(level11):
    assert level11.lam(2) == pytest.approx(-1.414214, abs=1e-6)
    assert level11.lam(3) == pytest.approx(-1 / math.sqrt(3))
    assert level11.lam(11) == pytest.approx(1 / math.sqrt(11))


def test_root_numbers(delta, level11):
    assert root_number(delta) == 1.0
    assert root_number(level11) == 1.0
    assert builtin_form('level1_weight18', 50).root_number == -1.0
    assert builtin_form('level1_weight22', 50).root_number == -1.0


@pytest.mark.parametrize("form_id", ['delta12', 'level1_weight16', 'level1_weight20',
                                     'level1_weight26', 'level11_weight2'])
def test_builtin_forms_pass_invariants(form_id):
    f = builtin_form(form_id, 1000)
    validate_sequence(f.coeffs, f.level, form_id=form_id)
    margin, n = deligne_margins(f)
    # lambda(1) = d(1) = 1 sits exactly on the bound
    assert margin >= 0 and n >= 1


def test_builtin_family_order():
    family = builtin_family('level1', 30)
    assert [f.form_id for f in family] == list(BUILTIN_SETS['level1'])
    with pytest.raises(DomainError):
        builtin_family('level2', 30)
    with pytest.raises(DomainError):
        builtin_form('delta13', 30)


def test_stored_range(delta):
    with pytest.raises(RangeError) as excinfo:
        delta.lam(delta.n_max + 1)
    assert excinfo.value.required == delta.n_max + 1
    with pytest.raises(RangeError):
        delta.lam(0)


def test_bernoulli_numbers():
    assert bernoulli(2) == pytest.approx(1 / 6)
    assert bernoulli(12) == pytest.approx(-691 / 2730)
    assert bernoulli(12) == Fraction(-691, 2730)
    assert bernoulli(26) == Fraction(8553103, 6)
    assert bernoulli(0) == 1 and bernoulli(7) == 0


@pytest.mark.parametrize("m, n", [(2, 3), (2, 2), (4, 6), (3, 9), (6, 10)])
def test_hecke_product_matches_multiplication(delta, m, n):
    assert hecke_product(delta, m, n) == pytest.approx(delta.lam(m) * delta.lam(n), abs=1e-12)


def test_hecke_product_at_the_level(level11):
    # d = 11 is excluded from the divisor sum
    assert hecke_product(level11, 11, 11) == pytest.approx(level11.lam(121))
    assert level11.lam(121) == pytest.approx(1 / 11)
    with pytest.raises(DomainError):
        hecke_product(level11, 0, 3)


def test_hecke_product_needs_coefficients(delta):
    with pytest.raises(RangeError):
        hecke_product(delta, 100, 100)


def test_power_expansion_terms():
    assert power_expansion_terms(0) == [(1, 0)]
    assert power_expansion_terms(2) == [(1, 0), (1, 2)]
    assert power_expansion_terms(3) == [(2, 1), (1, 3)]
    assert power_expansion_terms(4) == [(2, 0), (3, 2), (1, 4)]


@pytest.mark.parametrize("p, e", [(2, 3), (3, 4), (5, 2), (7, 5)])
def test_power_expansion(delta, p, e):
    assert power_expansion(delta, p, e) == pytest.approx(delta.lam(p) ** e, abs=1e-10)


def test_power_expansion_rejects_level_prime(level11):
    with pytest.raises(DomainError):
        power_expansion(level11, 11, 2)


def test_prime_power_beyond_storage(delta):
    short = builtin_form('delta12', 10)
    assert prime_power_eigenvalue(short, 2, 5) == pytest.approx(delta.lam(32), abs=1e-12)


def test_prime_frame(delta, level11):
    frame = prime_frame(delta, 2, 4)
    lp = delta.lam(2)
    assert frame.values[0] == 2.0
    assert frame.values[1] == lp
    assert frame.values[2] == pytest.approx(lp**2 - 2)
    # alpha_p^l + beta_p^l = lambda(p^l) - lambda(p^{l-2})
    assert frame.values[3] == pytest.approx(delta.lam(8) - delta.lam(2), abs=1e-12)
    ramified = prime_frame(level11, 11, 3)
    assert ramified.values[3] == pytest.approx(level11.lam(11) ** 3)


def test_round_trip_through_file(tmp_path, level11):
    path = tmp_path / 'level11.csv'
    write_coefficients(level11, path)
    loaded = load_coefficients(path)
    assert loaded.form_id == 'level11'
    assert loaded.source == 'file'
    assert loaded.root_number == level11.root_number
    assert np.array_equal(loaded.coeffs[1:], level11.coeffs[1:])


@pytest.mark.parametrize("n, value, invariant, first_bad", [
    (1, 0.9, 'lambda(1)=1', 1),
    (2, 2.5, 'deligne', 2),
    (6, 0.25, 'hecke', 6),
    # lambda(4) is first used by lambda(12) = lambda(4) lambda(3)
    (4, 0.75, 'hecke', 12),
])
def test_corrupted_files_are_rejected(tmp_path, delta, n, value, invariant, first_bad):
    coeffs = np.array(delta.coeffs[:201])
    coeffs[n] = value
    path = tmp_path / 'broken.csv'
    write_coefficient_file(path, 1, 12, coeffs)
    with pytest.raises(DataError) as excinfo:
        load_coefficients(path)
    assert excinfo.value.invariant == invariant
    assert excinfo.value.n == first_bad


def test_level_coefficient_checked(tmp_path, level11):
    coeffs = np.array(level11.coeffs[:51])
    coeffs[11] = 0.5
    # keep multiplicativity consistent below 50
    for m in (2, 3, 4):
        coeffs[11 * m] = coeffs[11] * coeffs[m]
    path = tmp_path / 'bad_level.csv'
    write_coefficient_file(path, 11, 2, coeffs)
    with pytest.raises(DataError) as excinfo:
        load_coefficients(path)
    assert excinfo.value.invariant == 'lambda(N)'


def test_bad_level_and_weight(tmp_path, delta):
    path = tmp_path / 'f.csv'
    write_coefficient_file(path, 12, 12, delta.coeffs[:20])
    with pytest.raises(DataError, match='level'):
        load_coefficients(path)
    write_coefficient_file(path, 1, 13, delta.coeffs[:20])
    with pytest.raises(DataError, match='weight'):
        load_coefficients(path)


@pytest.mark.parametrize("sign, weight, expected", [(1, 2, 1.0), (-1, 2, -1.0),
                                                     (1, 4, -1.0), (-1, 4, 1.0)])
def test_synthetic_root_numbers(sign, weight, expected):
    f = synthetic_form(101, weight, 500, seed=7, sign=sign)
    assert f.root_number == expected
    assert f.lam(101) == pytest.approx(sign / math.sqrt(101))


def test_synthetic_level_one_sign():
    # kappa = 2 mod 4 forces epsilon = -1 at level 1
    assert synthetic_form(1, 18, 100, seed=1).root_number == -1.0
    assert synthetic_form(1, 16, 100, seed=1).root_number == 1.0


def test_synthetic_forms_are_hecke_consistent():
    f = synthetic_form(101, 2, 2000, seed=3)
    validate_sequence(f.coeffs, f.level, form_id=f.form_id)
    assert f.form_id == 'synthetic_N101_k2_s3'
    again = synthetic_form(101, 2, 2000, seed=3)
    assert np.array_equal(f.coeffs[1:], again.coeffs[1:])


def test_synthetic_rejects_composite_level():
    with pytest.raises(DomainError):
        synthetic_form(100, 2, 500)

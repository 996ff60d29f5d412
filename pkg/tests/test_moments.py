import json
import math

import pytest

from models.forms import builtin_form, synthetic_form
from models.harper import BucketLabel, ShiftSpec
from models.lfun import central_value
from models.moments import (FormMoment, bucket_attribution, log_product, report_frame,
                            shifted_moment, write_report)
from services.family_runner import FamilyRunner
from utils.errors import DomainError

SQUARE = ShiftSpec((2,), (0,))
PAIR = ShiftSpec((1, 1), (1, -1))


def test_empty_family():
    report = shifted_moment([], SQUARE)
    assert report.total == 0.0
    assert report.normalized == 0.0
    assert report.per_form == ()
    assert report.N == 1


def test_single_form_square(level11):
    report = shifted_moment([level11], SQUARE)
    expected = abs(central_value(level11, 0.0).value) ** 2
    assert report.total == pytest.approx(expected, rel=1e-12)
    assert report.normalized == pytest.approx(expected / 11, rel=1e-12)
    assert report.kappa == 2


def test_conjugate_shifts_give_a_square(delta):
    report = shifted_moment([delta], PAIR)
    assert report.total == pytest.approx(abs(central_value(delta, 1.0).value) ** 2, rel=1e-10)


@pytest.mark.parametrize("form_id", ['delta12', 'level1_weight16', 'level11_weight2'])
@pytest.mark.parametrize("s", [0.5, 2.0, 3.0])
def test_exponent_scaling(form_id, s):
    f = builtin_form(form_id, 2000)
    base = log_product(f, PAIR)
    scaled = log_product(f, PAIR.scaled(s))
    assert abs(scaled - s * base) <= 1e-10 * max(1.0, abs(s * base))
    assert math.exp(scaled) == pytest.approx(math.exp(base) ** s, rel=1e-10)


def test_vanishing_central_value_contributes_zero():
    f = builtin_form('level1_weight18', 200)
    row = FormMoment(f.form_id, log_product(f, SQUARE))
    assert row.product == pytest.approx(0.0, abs=1e-20)
    assert FormMoment('x', -math.inf).product == 0.0


def test_threads_do_not_change_the_total(level1_family):
    serial = shifted_moment(level1_family, PAIR)
    threaded = shifted_moment(level1_family, PAIR, runner=FamilyRunner(4))
    assert threaded.total == serial.total
    assert [r.form_id for r in threaded.per_form] == [f.form_id for f in level1_family]
    reversed_order = shifted_moment(list(reversed(level1_family)), PAIR)
    assert reversed_order.total == serial.total


def test_mixed_levels_need_an_explicit_level(delta, level11):
    with pytest.raises(DomainError):
        shifted_moment([delta, level11], SQUARE)
    report = shifted_moment([delta, level11], SQUARE, level=11)
    assert report.N == 11
    assert report.kappa is None


def test_evaluation_failures_are_recorded(level11):
    short = synthetic_form(101, 2, 150, seed=2, form_id='short')
    report = shifted_moment([level11, short], SQUARE, level=101)
    assert [r.form_id for r in report.per_form] == ['level11_weight2']
    assert [fid for fid, _ in report.failures] == ['short']


def test_shift_limit_enforced():
    f = synthetic_form(101, 2, 500, seed=1)
    with pytest.raises(DomainError):
        shifted_moment([f], ShiftSpec((1,), (500.0,), A=1.0))


def test_bucket_attribution(level1_family, harper_cfg):
    plain = shifted_moment(level1_family, PAIR)
    report = bucket_attribution(plain, harper_cfg)
    assert all(isinstance(r.bucket, BucketLabel) for r in report.per_form)
    assert math.fsum(report.bucket_totals.values()) == report.total
    assert report.total == pytest.approx(plain.total, rel=1e-14)
    assert report.normalized == report.total / report.N
    assert report.surrogate_log_total >= math.log(report.total)
    assert report.surrogate_margin >= 0
    assert report.surrogate_total == math.inf or report.surrogate_total >= report.total


def test_single_bucket_total_is_exact(delta, harper_cfg):
    report = bucket_attribution(shifted_moment([delta], PAIR), harper_cfg)
    assert list(report.bucket_totals.values()) == [report.total]


def test_report_frame(delta, harper_cfg):
    plain = report_frame(shifted_moment([delta], PAIR))
    assert plain['bucket_kind'].tolist() == ['']
    assert plain['bucket_index'].isna().all()
    labelled = report_frame(bucket_attribution(shifted_moment([delta], PAIR), harper_cfg))
    assert labelled['bucket_kind'].tolist() == ['S']


def test_write_report(tmp_path, level1_family, harper_cfg):
    report = bucket_attribution(shifted_moment(level1_family, PAIR, family_id='level1'),
                                harper_cfg)
    json_path, csv_path = write_report(report, tmp_path / 'moment')

    lines = csv_path.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'form_id,bucket_kind,bucket_index,product'
    assert len(lines) == len(level1_family) + 2
    trailer = lines[-1].split(',')
    assert trailer[0] == 'TOTAL'
    assert float(trailer[1]) == report.total
    assert float(trailer[2]) == report.normalized

    data = json.loads(json_path.read_text(encoding='utf-8'))
    assert data['family_id'] == 'level1'
    assert data['total'] == report.total
    assert data['kappa'] is None
    assert [row['form_id'] for row in data['per_form']] == [f.form_id for f in level1_family]
    assert all(row['bucket'].startswith('S(') for row in data['per_form'])

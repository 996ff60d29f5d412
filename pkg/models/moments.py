"""
Shifted Moments
Family sums of prod_j |L(1/2 + i t_j, f)|^{a_j}, normalized by the level,
with the Harper bucket attribution and its truncated-exponential majorant
"""
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from models.harper import (BucketLabel, classify, surrogate_log_majorant, window_values)
from models.lfun import DEFAULT_WIDTH, central_value
from utils.errors import DomainError, LMomentError
from utils.report_writer import write_csv, write_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FormMoment:
    form_id: str
    log_product: float
    bucket: BucketLabel = None
    p_bucket: BucketLabel = None
    surrogate_log: float = None

    @property
    def product(self):
        return math.exp(self.log_product) if self.log_product > -math.inf else 0.0


@dataclass(frozen=True)
class MomentReport:
    """
    Shifted moment of a family

    per_form keeps the family order; total and every bucket total are
    correctly rounded sums (math.fsum) so they do not depend on it.
    """
    family_id: str
    N: int
    kappa: int
    spec: object
    per_form: tuple
    total: float
    normalized: float
    failures: tuple = ()
    bucket_totals: dict = field(default_factory=dict)
    surrogate_log_total: float = None
    family: tuple = field(default=(), repr=False, compare=False)

    @property
    def surrogate_total(self):
        if self.surrogate_log_total is None:
            return None
        return math.exp(self.surrogate_log_total) if self.surrogate_log_total < 709.0 else math.inf

    @property
    def surrogate_margin(self):
        """log(surrogate_total) - log(total)"""
        if self.surrogate_log_total is None or self.total <= 0:
            return None
        return self.surrogate_log_total - math.log(self.total)

    def to_dict(self):
        return {
            'family_id': self.family_id,
            'N': self.N,
            'kappa': self.kappa,
            'spec': {'a': list(self.spec.a), 't': list(self.spec.t), 'A': self.spec.A,
                     'a_total': self.spec.a_total},
            'per_form': [{'form_id': r.form_id, 'bucket': r.bucket, 'p_bucket': r.p_bucket,
                          'product': r.product, 'log_product': r.log_product,
                          'surrogate_log': r.surrogate_log} for r in self.per_form],
            'total': self.total,
            'normalized': self.normalized,
            'bucket_totals': {str(k): v for k, v in sorted(self.bucket_totals.items())},
            'surrogate_total': self.surrogate_total,
            'surrogate_log_total': self.surrogate_log_total,
            'surrogate_log_margin': self.surrogate_margin,
            'failures': [{'form_id': fid, 'error': msg} for fid, msg in self.failures],
        }


def _family_level(family, level):
    if level is not None:
        return int(level)
    levels = {f.level for f in family}
    if len(levels) > 1:
        raise DomainError(f"family mixes levels {sorted(levels)}; pass the level explicitly")
    return levels.pop() if levels else 1


def log_product(f, spec, width=DEFAULT_WIDTH):
    """sum_j a_j log|L(1/2 + i t_j, f)|, -inf when a central value vanishes"""
    # accumulated in logs
    total = 0.0
    for a, t in zip(spec.a, spec.t):
        value = abs(central_value(f, t, width=width).value)
        if value == 0:
            return -math.inf
        total += a * math.log(value)
    return total


def _evaluate(f, spec, width):
    try:
        return f.form_id, log_product(f, spec, width), None
    except LMomentError as e:
        logger.error("%s: evaluation failed: %s", f.form_id, e)
        return f.form_id, None, str(e)


def shifted_moment(family, spec, family_id='family', level=None, width=DEFAULT_WIDTH, runner=map):
    """
    Sum of prod_j |L(1/2 + i t_j, f)|^{a_j} over the family

    Args:
        family: Sequence of Eigenform
        spec: ShiftSpec
        family_id: Label for the report
        level: Normalizing N (defaults to the common level of the family)
        width: Smoothing width for the central values
        runner: Ordered map used for the per-form evaluations

    Returns:
        MomentReport: forms that could not be evaluated are listed in failures
    """
    family = tuple(family)
    N = _family_level(family, level)
    weights = {f.weight for f in family}
    kappa = weights.pop() if len(weights) == 1 else None
    for f in family:
        if f.level > 1:
            spec.check_shifts(f.level)

    # one log-product per form, in family order
    results = list(runner(lambda f: _evaluate(f, spec, width), family))
    per_form = tuple(FormMoment(fid, lp) for fid, lp, err in results if err is None)
    failures = tuple((fid, err) for fid, lp, err in results if err is not None)

    # exp each log-product, then a single compensated sum
    total = math.fsum(r.product for r in per_form)
    logger.info("%s: moment over %d forms = %.10g (normalized %.10g, %d failures)",
                family_id, len(per_form), total, total / N, len(failures))
    return MomentReport(family_id=family_id, N=N, kappa=kappa, spec=spec, per_form=per_form,
                        total=total, normalized=total / N, failures=failures, family=family)


def bucket_attribution(report, cfg, runner=map):
    """
    Label each evaluated form with its S- and P-bucket and fill bucket totals
    and the per-form majorant chain

    The returned total is the fsum of the bucket totals, so the two agree
    exactly; it differs from the unbucketed total by at most a few ulps.

    Returns:
        MomentReport: a new report
    """
    forms = {f.form_id: f for f in report.family}
    spec = report.spec

    def attribute(row):
        f = forms[row.form_id]
        values = window_values(f, spec, cfg)
        s_bucket, p_bucket = classify(f, spec, cfg, values)
        surrogate = surrogate_log_majorant(f, spec, cfg, s_bucket, p_bucket, values)
        return replace(row, bucket=s_bucket, p_bucket=p_bucket, surrogate_log=surrogate)

    per_form = tuple(runner(attribute, report.per_form))

    # fsum within each bucket, then across buckets
    buckets = {}
    for row in per_form:
        buckets.setdefault(row.bucket, []).append(row.product)
    bucket_totals = {label: math.fsum(products) for label, products in sorted(buckets.items())}

    surrogate = (float(logsumexp([row.surrogate_log for row in per_form]))
                 if per_form else -math.inf)
    total = math.fsum(bucket_totals.values())
    attributed = replace(report, per_form=per_form, bucket_totals=bucket_totals, total=total,
                         normalized=total / report.N, surrogate_log_total=surrogate)
    margin = attributed.surrogate_margin
    if margin is not None and margin < 0:
        logger.warning("%s: majorant below the moment (log margin %.4g)", report.family_id, margin)
    else:
        logger.info("%s: buckets %s, majorant log margin %s", report.family_id,
                    {str(k): len(v) for k, v in buckets.items()}, margin)
    return attributed


def report_frame(report):
    """form_id, bucket_kind, bucket_index, product rows"""
    rows = [{'form_id': r.form_id,
             'bucket_kind': r.bucket.kind if r.bucket is not None else '',
             'bucket_index': r.bucket.index if r.bucket is not None else np.nan,
             'product': r.product} for r in report.per_form]
    df = pd.DataFrame(rows, columns=['form_id', 'bucket_kind', 'bucket_index', 'product'])
    df['bucket_index'] = df['bucket_index'].astype('Int64')
    return df


def write_report(report, stem, formats=('json', 'csv')):
    """
    Write <stem>.json and/or <stem>.csv

    Returns:
        list: paths written
    """
    written = []
    if 'json' in formats:
        written.append(write_json(report.to_dict(), f"{stem}.json"))
    if 'csv' in formats:
        trailer = ['TOTAL', report.total, report.normalized]
        written.append(write_csv(report_frame(report), f"{stem}.csv", trailer=trailer))
    return written

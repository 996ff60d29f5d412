"""
verify: property suites over a family of forms

Each suite returns a result dict with its checks, the worst margin and the
failing items; the command exits 0 only when every suite passes.
"""
import cmath
import logging
import math

import numpy as np

from commands.common import (DEFAULT_HARPER_N, EXIT_FAILURE, EXIT_OK, add_family_flags,
                             add_shared_flags, emit, family_paths, float_list, harper_config,
                             run_config)
from models.forms import (HECKE_TOLERANCE, builtin_family, deligne_margins, hecke_product,
                          load_coefficients, power_expansion, prime_frame, root_number)
from models.harper import ShiftSpec, grh_desk_check
from models.lfun import afe_value, dirichlet_partial, euler_product_log, fe_residuals
from utils.arith import fit_logp_constant, mertens_constant_estimate, mertens_table, primes_up_to
from utils.errors import ConfigError, DataError
from utils.special import (bessel_j_recurrence, bessel_j_series, kloosterman, majorization_probe)

logger = logging.getLogger(__name__)

HECKE_MN_LIMIT = 200
POWER_PRIMES = (2, 3, 5, 7)
POWER_MAX_EXPONENT = 5
DELIGNE_LIMIT = 10**4
FRAME_MAX_L = 20
FRAME_PRIMES = 100
FE_GRID = np.linspace(-5.0, 5.0, 21)
AGREEMENT_TOLERANCE = 1e-6
KLOOSTERMAN_TRIPLES = 200
KLOOSTERMAN_MAX_C = 10**4
WEIL_MAX_PRIME = 101
BESSEL_TOLERANCE = 1e-8
BESSEL_ORDERS = (0, 1, 5, 11, 25)
BESSEL_POINTS = (0.5, 1.0, 5.0, 10.0, 20.0, 40.0)
MERTENS_XS = (10**3, 10**4, 10**5, 10**6)
LOGP_FIT_XS = tuple(int(10 ** (2 + 0.25 * i)) for i in range(21))
GRH_TS = (0.0, 1.0, -1.0, 3.0, -3.0)
GRH_XS = (50.0, 100.0, 500.0)
GRH_SPEC = ShiftSpec((1.0, 1.0), (1.0, -1.0))

SUITES = ('hecke', 'deligne', 'fe', 'agreement', 'kloosterman', 'mertens', 'grh', 'majorant')


def register(subparsers):
    parser = subparsers.add_parser('verify', help='Run the property suites')
    add_shared_flags(parser)
    add_family_flags(parser)
    parser.set_defaults(n_max=10**5)
    parser.add_argument('--suite', action='append', choices=SUITES, default=None)
    parser.add_argument('--x', type=float_list, default=None, help='Mertens cutoffs')
    parser.add_argument('--N', dest='harper_N', type=int, default=DEFAULT_HARPER_N)
    parser.set_defaults(handler=run)
    return parser


def _result(suite, checks, margins, failures, **extra):
    worst = float(min(margins)) if len(margins) else math.inf
    passed = not failures and worst >= 0
    level = logging.INFO if passed else logging.WARNING
    logger.log(level, "suite %s: %s (%d checks, worst margin %.3e)",
               suite, 'pass' if passed else 'FAIL', checks, worst)
    return {'suite': suite, 'passed': passed, 'checks': checks, 'worst_margin': worst,
            'failures': failures, **extra}


def suite_hecke(forms, context):
    margins, failures, checks = [], [], 0
    for f in forms:
        limit = min(HECKE_MN_LIMIT, f.n_max)
        for m in range(1, limit + 1):
            for n in range(1, limit // m + 1):
                err = abs(f.lam(m) * f.lam(n) - hecke_product(f, m, n))
                margins.append(HECKE_TOLERANCE - err)
                checks += 1
                if err > HECKE_TOLERANCE:
                    failures.append({'form_id': f.form_id, 'm': m, 'n': n, 'error': err})
        for p in POWER_PRIMES:
            if f.level % p == 0 or p > f.n_max:
                continue
            for e in range(POWER_MAX_EXPONENT + 1):
                err = abs(power_expansion(f, p, e) - f.lam(p) ** e)
                margins.append(HECKE_TOLERANCE - err)
                checks += 1
                if err > HECKE_TOLERANCE:
                    failures.append({'form_id': f.form_id, 'p': p, 'e': e, 'error': err})
    return _result('hecke', checks, margins, failures)


def suite_deligne(forms, context):
    margins, failures, checks = [], [], 0
    for f in forms:
        margin, n = deligne_margins(f, DELIGNE_LIMIT)
        margins.append(margin)
        checks += min(f.n_max, DELIGNE_LIMIT)
        if margin < -HECKE_TOLERANCE:
            failures.append({'form_id': f.form_id, 'invariant': 'deligne', 'n': n})
        for p in primes_up_to(max(2, min(FRAME_PRIMES, f.n_max))).primes.tolist():
            if f.level % p == 0:
                continue
            u = prime_frame(f, p, FRAME_MAX_L).values
            margin = 2.0 + HECKE_TOLERANCE - float(np.max(np.abs(u)))
            margins.append(margin)
            checks += 1
            if margin < 0:
                failures.append({'form_id': f.form_id, 'invariant': 'prime_frame', 'p': p})
    return _result('deligne', checks, margins, failures)


def suite_fe(forms, context):
    margins, failures, checks = [], [], 0
    for f in forms:
        try:
            root_number(f)
        except DataError as e:
            failures.append({'form_id': f.form_id, 'invariant': e.invariant, 'error': str(e)})
            continue
        df = fe_residuals(f, FE_GRID)
        margins.extend(df['margin'].tolist())
        checks += len(df)
        for row in df[df['margin'] < 0].itertuples():
            failures.append({'form_id': f.form_id, 't': row.t, 'residual': row.residual})
    return _result('fe', checks, margins, failures,
                   root_numbers={f.form_id: f.root_number for f in forms})


def suite_agreement(forms, context):
    margins, failures, checks, rows = [], [], 0, []
    for f in forms:
        direct = dirichlet_partial(f, 2.0).value
        euler = cmath.exp(euler_product_log(f, 2.0, f.n_max))
        afe = afe_value(f, 2.0).value
        for method, value in (('euler', euler), ('afe', afe)):
            err = abs(value - direct)
            margins.append(AGREEMENT_TOLERANCE - err)
            checks += 1
            rows.append({'form_id': f.form_id, 'method': method, 'difference': err})
            if err > AGREEMENT_TOLERANCE:
                failures.append({'form_id': f.form_id, 'method': method, 'difference': err})
    return _result('agreement', checks, margins, failures, differences=rows)


def suite_kloosterman(forms, context):
    rng = np.random.default_rng(context['seed'])
    margins, failures, checks = [], [], 0
    for _ in range(KLOOSTERMAN_TRIPLES):
        m, n = (int(v) for v in rng.integers(1, 1000, size=2))
        c = int(rng.integers(1, KLOOSTERMAN_MAX_C + 1))
        err = abs(kloosterman(m, n, c) - kloosterman(n, m, c))
        tol = 1e-10 * max(1, c)
        margins.append(tol - err)
        checks += 1
        if err > tol:
            failures.append({'check': 'symmetry', 'm': m, 'n': n, 'c': c, 'error': err})

    for p in primes_up_to(WEIL_MAX_PRIME).primes.tolist():
        for m, n in ((1, 1), (1, 2), (3, 7), (p, 1)):
            bound = 2.0 * math.sqrt(math.gcd(math.gcd(m, n), p)) * math.sqrt(p) + 1e-9
            margin = bound - abs(kloosterman(m, n, p))
            margins.append(margin)
            checks += 1
            if margin < 0:
                failures.append({'check': 'weil', 'm': m, 'n': n, 'c': p})

    for order in BESSEL_ORDERS:
        for x in BESSEL_POINTS:
            err = abs(bessel_j_series(order, x) - bessel_j_recurrence(order, x))
            margins.append(BESSEL_TOLERANCE - err)
            checks += 1
            if err > BESSEL_TOLERANCE:
                failures.append({'check': 'bessel', 'order': order, 'x': x, 'error': err})
    return _result('kloosterman', checks, margins, failures)


def suite_mertens(forms, context):
    xs = context['x'] or MERTENS_XS
    b_est = mertens_constant_estimate()
    C = fit_logp_constant(LOGP_FIT_XS)
    df = mertens_table(xs, b_est=b_est, C=C)
    margins = df['recip_margin'].tolist() + df['logp_margin'].tolist()
    failures = [{'x': row.x, 'recip_margin': row.recip_margin, 'logp_margin': row.logp_margin}
                for row in df.itertuples() if row.recip_margin < 0 or row.logp_margin < 0]
    for row in df.itertuples():
        logger.info("mertens x=%g: recip margin %.4g, logp margin %.4g",
                    row.x, row.recip_margin, row.logp_margin)
    return _result('mertens', len(df), margins, failures, b_est=b_est, C=C, table=df)


def suite_grh(forms, context):
    cfg = context['harper']
    df = grh_desk_check(forms, GRH_SPEC, cfg, ts=GRH_TS, xs=GRH_XS)
    failures = df[df['margin'] < 0].to_dict(orient='records')
    return _result('grh', len(df), df['margin'].dropna().tolist(), failures, table=df)


def suite_majorant(forms, context):
    report = majorization_probe(seed=context['seed'])
    margins = [r['worst_margin'] for r in report.values()]
    failures = [{'ell': ell, **r} for ell, r in report.items() if r['failures']]
    checks = sum(r['samples'] for r in report.values())
    return _result('majorant', checks, margins, failures, probe=report)


SUITE_FUNCTIONS = {
    'hecke': suite_hecke,
    'deligne': suite_deligne,
    'fe': suite_fe,
    'agreement': suite_agreement,
    'kloosterman': suite_kloosterman,
    'mertens': suite_mertens,
    'grh': suite_grh,
    'majorant': suite_majorant,
}


def _load_forms(args, config):
    """Family for the suites; load failures are reported, not raised"""
    forms, failures = [], []
    paths = family_paths(args)
    builtin_set = args.builtin_set or (None if paths else 'all')
    if builtin_set:
        forms += builtin_family(builtin_set, config.n_max)
    for path in paths:
        try:
            forms.append(load_coefficients(path))
        except DataError as e:
            logger.warning("rejected %s: %s", path, e)
            failures.append({'path': str(path), 'invariant': e.invariant, 'n': e.n, 'error': str(e)})
    return forms, failures


def run(args):
    config = run_config(args, x=tuple(args.x or ()))
    suites = args.suite or list(SUITES)
    forms, load_failures = _load_forms(args, config)
    if not forms and not load_failures:
        raise ConfigError("verify found no forms")

    context = {'seed': config.seed, 'x': config.x, 'harper': harper_config(config, args.harper_N)}
    results = []
    if load_failures:
        results.append(_result('load', len(load_failures), [], load_failures))
    for suite in suites:
        results.append(SUITE_FUNCTIONS[suite](forms, context))

    passed = all(r['passed'] for r in results)
    payload = {'passed': passed, 'forms': [f.form_id for f in forms], 'suites': results}
    emit(config, payload, default_stem='verify')
    return EXIT_OK if passed else EXIT_FAILURE

"""
harper: ladder, bucket labels, threshold margins and window diagnostics for a family
"""
import logging
import math
from collections import Counter

from commands.common import (DEFAULT_HARPER_N, EXIT_FAILURE, EXIT_OK, add_family_flags,
                             add_shared_flags, add_spec_flags, emit, harper_config, load_family,
                             output_stem, run_config, runner, shift_spec)
from models.harper import (bucket_measure_bounds, classify, lemma26_rhs, threshold_margins,
                           v0_threshold, verify_thresholds, window_mertens, window_values)
from models.moments import log_product
from utils.errors import RangeError
from utils.report_writer import write_csv

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('harper', help='Harper decomposition of a family')
    add_shared_flags(parser)
    add_family_flags(parser)
    add_spec_flags(parser, a='1,1', t='1,-1')
    parser.add_argument('--N', dest='harper_N', type=int, default=DEFAULT_HARPER_N)
    parser.add_argument('--C0', type=float, default=0.0, help='Constant inside V_0')
    parser.set_defaults(handler=run)
    return parser


def run(args):
    config = run_config(args)
    cfg = harper_config(config, args.harper_N)
    spec = shift_spec(config)
    family = load_family(args)
    pool = runner(config)

    values = pool.map(lambda f: window_values(f, spec, cfg), family)
    labels = [classify(f, spec, cfg, v) for f, v in zip(family, values)]
    verified = pool.map(lambda item: verify_thresholds(item[0], spec, cfg, item[1][0]),
                        list(zip(family, labels)))

    x = cfg.threshold(cfg.J)
    lemma26 = []
    if x >= 4:
        for f in family:
            try:
                rhs = lemma26_rhs(f, spec, 0.5, x, cfg)
            except RangeError as e:
                # x = N^{alpha_J} past the sieve cap or the stored coefficients
                logger.info("%s: log bound not computed: %s", f.form_id, e)
                lemma26.append({'form_id': f.form_id, 'x': x, 'lhs': math.nan,
                                'rhs': math.nan, 'margin': math.nan})
                continue
            lhs = log_product(f, spec)
            lemma26.append({'form_id': f.form_id, 'x': x, 'lhs': lhs, 'rhs': rhs,
                            'margin': rhs - lhs})

    forms = [{'form_id': f.form_id, 's_bucket': s, 'p_bucket': p, 'threshold_margin': margin}
             for f, (s, p), margin in zip(family, labels, verified)]
    partition = Counter(str(s) for s, _ in labels)
    payload = {
        'config': {'N': cfg.N, 'T': cfg.T, 'J': cfg.J, 'sieve_J': cfg.sieve_J,
                   'alphas': list(cfg.alphas[:cfg.J + 1]),
                   'p_max_index': cfg.p_max_index, 'lambda_smooth': cfg.lambda_smooth,
                   'slack_C': cfg.slack_C, 'log_V0': v0_threshold(cfg, spec, args.C0)},
        'spec': {'a': list(spec.a), 't': list(spec.t), 'A': spec.A},
        'family_size': len(family),
        'partition': dict(sorted(partition.items())),
        'forms': forms,
        'window_mertens': window_mertens(cfg),
        'bucket_measure_bounds': bucket_measure_bounds(family, spec, cfg, labels, values),
        'lemma26': lemma26,
    }
    stem = output_stem(config, 'harper').with_suffix('')
    emit(config, payload, default_stem='harper')
    write_csv(threshold_margins(family, spec, cfg, values),
              stem.with_name(stem.name + '_margins.csv'))

    failed = [row['form_id'] for row in forms if row['threshold_margin'] < 0]
    failed += [row['form_id'] for row in lemma26 if not math.isnan(row['margin']) and row['margin'] < 0]
    if failed:
        logger.warning("harper checks failed for %s", sorted(set(failed)))
    logger.info("partition over %d forms: %s", len(family), dict(partition))
    return EXIT_FAILURE if failed else EXIT_OK

"""
lvalue: L(sigma + it, f) over a t-grid for every form of a family
"""
import logging

from commands.common import (EXIT_FAILURE, EXIT_OK, add_family_flags, add_shared_flags, emit,
                             float_list, load_family, run_config, runner)
from models.lfun import DEFAULT_WIDTH, afe_value, dirichlet_partial, l_value
from utils.errors import LMomentError

logger = logging.getLogger(__name__)

METHODS = ('auto', 'afe', 'dirichlet')


def register(subparsers):
    parser = subparsers.add_parser('lvalue', help='Evaluate L-values')
    add_shared_flags(parser)
    add_family_flags(parser)
    parser.add_argument('--sigma', type=float, default=0.5)
    parser.add_argument('--t-grid', dest='t_grid', type=float_list, default=(0.0,))
    parser.add_argument('--method', choices=METHODS, default='auto')
    parser.add_argument('--width', type=float, default=DEFAULT_WIDTH)
    parser.set_defaults(handler=run)
    return parser


def evaluate(f, sigma, t, method, width):
    s = complex(sigma, t)
    if method == 'afe':
        return afe_value(f, s, width=width)
    if method == 'dirichlet':
        return dirichlet_partial(f, s)
    return l_value(f, s, width=width)


def run(args):
    config = run_config(args, t_grid=tuple(args.t_grid))
    family = load_family(args)

    def rows_for(f):
        rows, errors = [], []
        for t in config.t_grid:
            try:
                v = evaluate(f, args.sigma, t, args.method, args.width)
            except LMomentError as e:
                logger.error("%s at t=%g: %s", f.form_id, t, e)
                errors.append({'form_id': f.form_id, 't': t, 'error': str(e)})
                continue
            rows.append({'form_id': f.form_id, 'sigma': args.sigma, 't': t,
                         're': v.value.real, 'im': v.value.imag, 'abs': abs(v.value),
                         'method': v.method, 'trunc_error': v.trunc_error})
        return rows, errors

    results = runner(config).map(rows_for, family)
    rows = [r for part, _ in results for r in part]
    errors = [e for _, part in results for e in part]
    emit(config, {'values': rows, 'failures': errors}, table=rows, default_stem='lvalue')
    return EXIT_FAILURE if errors else EXIT_OK

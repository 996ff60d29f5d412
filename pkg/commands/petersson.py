"""
petersson: main term and Kloosterman-Bessel tail, with the empirical residual
when a family is given
"""
import logging

from commands.common import (EXIT_OK, add_family_flags, add_shared_flags, emit, family_paths,
                             int_list, load_family, run_config)
from models.petersson import (average_shape_report, delta_infty_residual, delta_prime,
                              delta_star_empirical, sign_class_sizes, truncation_profile)
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

PROFILE_FACTORS = (10, 100, 1000)


def register(subparsers):
    parser = subparsers.add_parser('petersson', help='Petersson averages')
    add_shared_flags(parser)
    parser.add_argument('--kappa', type=int, default=None)
    parser.add_argument('--level', type=int, default=None)
    parser.add_argument('--n', dest='ns', type=int_list, default=(1, 2, 3, 4))
    parser.add_argument('--Y', dest='Y', type=float, default=1.0)
    parser.add_argument('--c-max', dest='c_max', type=int, default=None)
    add_family_flags(parser)
    parser.set_defaults(n_max=1000, handler=run)
    return parser


def _homogeneous(family, kappa, level):
    """Forms matching --kappa / --level; the rest must share one weight and level"""
    if kappa is not None:
        family = [f for f in family if f.weight == kappa]
    if level is not None:
        family = [f for f in family if f.level == level]
    if not family:
        raise ConfigError(f"no form in the family has weight {kappa} and level {level}")
    weights = sorted({f.weight for f in family})
    levels = sorted({f.level for f in family})
    if len(weights) > 1 or len(levels) > 1:
        raise ConfigError(f"petersson averages need one weight and level, the family has weights "
                          f"{weights} and levels {levels}; select one with --kappa / --level")
    return family


def run(args):
    config = run_config(args)
    family = load_family(args) if (args.builtin_set or family_paths(args)) else []
    if family:
        family = _homogeneous(family, args.kappa, args.level)
        kappa, level = family[0].weight, family[0].level
    else:
        if args.kappa is None or args.level is None:
            raise ConfigError("petersson needs --kappa and --level, or a family")
        kappa, level = args.kappa, args.level
    if config.c_max is not None and config.c_max < level:
        raise ConfigError(f"--c-max must be >= the level {level}")

    rows = []
    for n in args.ns:
        term = delta_prime(kappa, level, n, config.Y, config.c_max)
        row = {'n': n, 'main_term': term.main_term, 'kloosterman_tail': term.kloosterman_tail,
               'delta_prime': term.value, 'truncation_estimate': term.truncation_estimate,
               'c_max': term.c_max}
        if family:
            row['delta_star'] = delta_star_empirical(family, n)
            row['residual'] = delta_infty_residual(family, n, config.Y, config.c_max)
        rows.append(row)

    payload = {'kappa': kappa, 'level': level, 'Y': config.Y, 'terms': rows,
               'truncation_profiles': {
                   str(n): truncation_profile(kappa, level, n, config.Y,
                                              [level * k for k in PROFILE_FACTORS])
                   for n in args.ns}}
    if family:
        payload['sign_classes'] = sign_class_sizes(family)
        payload['average_shape'] = average_shape_report(family, args.ns, c_max=config.c_max)
    emit(config, payload, table=rows, default_stem='petersson')
    return EXIT_OK

"""
moment: shifted moment of a family, optionally attributed to Harper buckets
"""
import logging

from commands.common import (DEFAULT_HARPER_N, EXIT_FAILURE, EXIT_OK, add_family_flags,
                             add_shared_flags, add_spec_flags, harper_config, load_family,
                             output_stem, run_config, runner, shift_spec)
from models.lfun import DEFAULT_WIDTH
from models.moments import bucket_attribution, shifted_moment, write_report

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('moment', help='Shifted moment of a family')
    add_shared_flags(parser)
    add_family_flags(parser)
    add_spec_flags(parser)
    parser.add_argument('--buckets', action='store_true', help='Add the Harper attribution')
    parser.add_argument('--N', dest='harper_N', type=int, default=DEFAULT_HARPER_N,
                        help='N of the Harper ladder')
    parser.add_argument('--level', type=int, default=None, help='Normalizing N')
    parser.add_argument('--family-id', dest='family_id', default=None)
    parser.add_argument('--width', type=float, default=DEFAULT_WIDTH)
    parser.set_defaults(handler=run)
    return parser


def run(args):
    config = run_config(args)
    spec = shift_spec(config)
    family = load_family(args)
    family_id = args.family_id or args.builtin_set or 'family'
    pool = runner(config)

    report = shifted_moment(family, spec, family_id=family_id, level=args.level,
                            width=args.width, runner=pool.map)
    if args.buckets:
        report = bucket_attribution(report, harper_config(config, args.harper_N), runner=pool.map)

    formats = config.formats or ('json', 'csv')
    write_report(report, str(output_stem(config, 'moment')), formats)
    logger.info("normalized moment %.10g over N=%d", report.normalized, report.N)
    return EXIT_FAILURE if report.failures else EXIT_OK

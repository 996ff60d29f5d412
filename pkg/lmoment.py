"""
lmoment - shifted moments of modular L-functions at desk scale

Usage:
    python lmoment.py <command> [flags]

Commands: gen-forms, verify, lvalue, moment, harper, petersson
"""
import argparse
import logging
import sys

from commands import gen_forms, harper, lvalue, moment, petersson, verify
from commands.common import EXIT_FAILURE, EXIT_USAGE, configure_logging
from utils.errors import CoefficientParseError, ConfigError, DataError, DomainError, LMomentError

logger = logging.getLogger('lmoment')

COMMANDS = (gen_forms, verify, lvalue, moment, harper, petersson)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='lmoment',
        description='Hecke eigenforms, L-values, Petersson averages and shifted moments')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for module in COMMANDS:
        module.register(subparsers)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0

    configure_logging(args)
    try:
        return args.handler(args)
    except (ConfigError, DomainError, CoefficientParseError, FileNotFoundError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except DataError as e:
        logger.error("%s (invariant: %s, n=%s)", e, e.invariant, e.n)
        return EXIT_FAILURE
    except LMomentError as e:
        logger.error("%s", e)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())

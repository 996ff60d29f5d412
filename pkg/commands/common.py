"""
Shared CLI plumbing: flags, family selection, logging and output
"""
import logging
from pathlib import Path

import pandas as pd

from models.forms import BUILTIN_SETS, builtin_family, load_coefficients
from models.harper import DEFAULT_SLACK_C, DEFAULT_T, LAMBDA_0, HarperConfig, ShiftSpec
from services.family_runner import FamilyRunner
from services.run_config import RunConfig
from utils.errors import ConfigError
from utils.report_writer import write_csv, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

DEFAULT_N_MAX = 10**4
DEFAULT_HARPER_N = 10**6


def float_list(text):
    """'1,-0.5, 2' -> (1.0, -0.5, 2.0)"""
    try:
        return tuple(float(v) for v in text.split(',') if v.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}")


def int_list(text):
    try:
        return tuple(int(float(v)) for v in text.split(',') if v.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}")


def add_shared_flags(parser):
    parser.add_argument('--out', default=None, help='Output path (file stem for reports)')
    parser.add_argument('--format', dest='formats', action='append', choices=['json', 'csv'],
                        help='Output format (repeatable)')
    parser.add_argument('--threads', type=int, default=1)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--slack-C', dest='slack_C', type=float, default=DEFAULT_SLACK_C)
    parser.add_argument('--T', dest='T', type=float, default=DEFAULT_T)
    parser.add_argument('--lambda', dest='lambda_smooth', type=float, default=LAMBDA_0)
    parser.add_argument('--verbose', action='store_true')
    parser.add_argument('--quiet', action='store_true')


def add_family_flags(parser):
    parser.add_argument('--builtin-set', choices=sorted(BUILTIN_SETS), default=None)
    parser.add_argument('--forms', nargs='+', default=None, help='Coefficient files')
    parser.add_argument('--forms-dir', default=None, help='Directory of coefficient files')
    parser.add_argument('--n-max', dest='n_max', type=int, default=DEFAULT_N_MAX)


def add_spec_flags(parser, a='2', t='0'):
    parser.add_argument('--a', type=float_list, default=float_list(a))
    parser.add_argument('--t', type=float_list, default=float_list(t))
    parser.add_argument('--A', dest='A', type=float, default=1.0)


def configure_logging(args):
    level = logging.INFO
    if getattr(args, 'verbose', False):
        level = logging.DEBUG
    elif getattr(args, 'quiet', False):
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s',
                        force=True)


def run_config(args, **extra):
    """RunConfig from parsed flags"""
    values = {
        'command': args.command,
        'out': args.out,
        'formats': tuple(args.formats) if args.formats else (),
        'threads': args.threads,
        'seed': args.seed,
        'T': args.T,
        'slack_C': args.slack_C,
        'lambda_smooth': args.lambda_smooth,
    }
    for name in ('n_max', 'a', 't', 'A', 'Y', 'c_max'):
        if getattr(args, name, None) is not None:
            values[name] = getattr(args, name)
    values.update(extra)
    return RunConfig(**values)


def family_paths(args):
    paths = list(args.forms or [])
    if args.forms_dir:
        directory = Path(args.forms_dir)
        if not directory.is_dir():
            raise ConfigError(f"--forms-dir {directory} is not a directory")
        paths += sorted(str(p) for p in directory.iterdir() if p.is_file())
    return paths


def load_family(args, n_max=None):
    """
    Built-in set and/or coefficient files named on the command line, in that order

    Raises:
        ConfigError: when no family is selected
    """
    paths = family_paths(args)
    if not args.builtin_set and not paths:
        raise ConfigError("no family selected: pass --builtin-set, --forms or --forms-dir")
    family = []
    if args.builtin_set:
        family += builtin_family(args.builtin_set, n_max or args.n_max)
    for path in paths:
        if not Path(path).is_file():
            raise ConfigError(f"coefficient file {path} not found")
        family.append(load_coefficients(path))
    logger.info("family of %d forms", len(family))
    return family


def shift_spec(config):
    try:
        return ShiftSpec(config.a, config.t, config.A)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def harper_config(config, N):
    return HarperConfig(N=N, T=config.T, lambda_smooth=config.lambda_smooth,
                        slack_C=config.slack_C)


def runner(config):
    return FamilyRunner(config.threads)


def output_stem(config, default):
    return Path(config.out) if config.out else Path(default)


def emit(config, payload, table=None, default_stem=None, default_formats=('json',)):
    """
    Write a JSON payload and/or a CSV table

    Returns:
        list: paths written
    """
    stem = output_stem(config, default_stem or config.command)
    formats = config.formats or default_formats
    written = []
    if 'json' in formats:
        written.append(write_json(payload, stem.with_suffix('.json')))
    if 'csv' in formats and table is not None:
        written.append(write_csv(pd.DataFrame(table), stem.with_suffix('.csv')))
    return written

"""
gen-forms: write built-in or synthetic eigenvalue sequences to coefficient files
"""
import logging
from pathlib import Path

from commands.common import EXIT_OK, add_shared_flags, run_config
from models.forms import BUILTIN_FORMS, builtin_form, synthetic_form, write_coefficients
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

SUFFIX = '.csv'


def register(subparsers):
    parser = subparsers.add_parser('gen-forms', help='Write coefficient files')
    add_shared_flags(parser)
    parser.add_argument('--id', dest='form_id', default=None,
                        help=f"Built-in form ({', '.join(BUILTIN_FORMS)})")
    parser.add_argument('--synthetic', type=int, default=0,
                        help='Number of synthetic Hecke sequences to write')
    parser.add_argument('--level', type=int, default=101)
    parser.add_argument('--weight', type=int, default=2)
    parser.add_argument('--n-max', dest='n_max', type=int, default=1000)
    parser.set_defaults(handler=run)
    return parser


def run(args):
    config = run_config(args)
    if not args.form_id and args.synthetic < 1:
        raise ConfigError("gen-forms needs --id or --synthetic K")

    written = []
    if args.form_id:
        f = builtin_form(args.form_id, config.n_max)
        path = Path(config.out) if config.out else Path(f"{args.form_id}{SUFFIX}")
        path.parent.mkdir(parents=True, exist_ok=True)
        write_coefficients(f, path)
        written.append(path)

    if args.synthetic:
        directory = Path(config.out) if config.out and not args.form_id else Path('synthetic')
        directory.mkdir(parents=True, exist_ok=True)
        for k in range(args.synthetic):
            f = synthetic_form(args.level, args.weight, config.n_max, seed=config.seed + k,
                               form_id=f"synthetic_N{args.level}_k{args.weight}_{k:03d}")
            path = directory / f"{f.form_id}{SUFFIX}"
            write_coefficients(f, path)
            written.append(path)

    for path in written:
        logger.info("wrote %s", path)
    return EXIT_OK

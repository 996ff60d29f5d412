"""
Run Configuration - validated knobs for one CLI run
"""
import math
import os
from dataclasses import dataclass, field

from dotenv import load_dotenv

from models.harper import LAMBDA_0
from models.lfun import MAX_ABS_T
from utils.errors import ConfigError

# Load environment variables
load_dotenv()

THREADS_ENV = 'LMOMENT_THREADS'
FORMATS = ('json', 'csv')


def threads_override():
    """
    Thread count from LMOMENT_THREADS (environment or .env), or None when unset
    """
    raw = os.getenv(THREADS_ENV)
    if raw is None or raw.strip() == '':
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {value}")
    return value


@dataclass(frozen=True)
class RunConfig:
    """Every numeric knob of a run; flags are the only source except LMOMENT_THREADS"""
    command: str
    out: str = None
    formats: tuple = FORMATS
    threads: int = 1
    seed: int = 0
    T: float = 1.0
    slack_C: float = 5.0
    lambda_smooth: float = LAMBDA_0
    n_max: int = None
    x: tuple = ()
    Y: float = 1.0
    c_max: int = None
    t_grid: tuple = ()
    a: tuple = ()
    t: tuple = ()
    A: float = 1.0
    inputs: tuple = field(default=())

    def __post_init__(self):
        env_threads = threads_override()
        if env_threads is not None:
            object.__setattr__(self, 'threads', env_threads)
        self.validate()

    def validate(self):
        if self.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {self.threads}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"--seed must be in [0, 2^64), got {self.seed}")
        if not self.T > 0:
            raise ConfigError(f"--T must be positive, got {self.T}")
        if not self.slack_C >= 0:
            raise ConfigError(f"--slack-C must be >= 0, got {self.slack_C}")
        if self.lambda_smooth < LAMBDA_0:
            raise ConfigError(f"--lambda must be >= {LAMBDA_0:.6f}, got {self.lambda_smooth}")
        if self.n_max is not None and self.n_max < 1:
            raise ConfigError(f"--n-max must be >= 1, got {self.n_max}")
        if not self.Y >= 1:
            raise ConfigError(f"--Y must be >= 1, got {self.Y}")
        if self.c_max is not None and self.c_max < 1:
            raise ConfigError(f"--c-max must be >= 1, got {self.c_max}")
        for t in tuple(self.t_grid) + tuple(self.t):
            if not math.isfinite(t) or abs(t) > MAX_ABS_T:
                raise ConfigError(f"shift {t} outside |t| <= {MAX_ABS_T:g}")
        if any(not a > 0 for a in self.a):
            raise ConfigError(f"--a values must be positive, got {self.a}")
        if self.a and len(self.a) != len(self.t):
            raise ConfigError(f"--a and --t need the same length ({len(self.a)} vs {len(self.t)})")
        if not self.A > 0:
            raise ConfigError(f"--A must be positive, got {self.A}")
        if any(x < 2 for x in self.x):
            raise ConfigError(f"--x values must be >= 2, got {self.x}")
        unknown = set(self.formats) - set(FORMATS)
        if unknown:
            raise ConfigError(f"unknown output format(s) {sorted(unknown)}")

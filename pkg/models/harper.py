"""
Harper Decomposition
Shift weights h(n), the GRH log-bounds for log|L|, the alpha ladder with its
windowed Dirichlet polynomials M_{i,j} and P_m, the S(j) / P(m)
classification of a family, truncated-exponential majorants and tail counts
"""
import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from models.forms import prime_frame, prime_power_eigenvalue
from models.lfun import DEFAULT_WIDTH, afe_value
from utils.arith import mertens_sums, primes_up_to
from utils.errors import ConfigError, DomainError, RangeError
from utils.special import truncated_exp

logger = logging.getLogger(__name__)

DEFAULT_T = 1.0
DEFAULT_SLACK_C = 5.0
MIN_LEVEL = 100
WINDOW_SIEVE_CAP = 10**9
DIRECT_LOOP_CAP = 10**5
LOG_TINY = math.log(np.finfo(float).tiny)
WINDOW_MERTENS_BAND = 0.5


def lambda_zero():
    """The positive root of exp(-x) = x + x^2/2 (about 0.4912)"""
    return brentq(lambda x: math.exp(-x) - x - 0.5 * x * x, 0.0, 1.0, xtol=1e-15)


LAMBDA_0 = lambda_zero()


@dataclass(frozen=True)
class ShiftSpec:
    """
    Exponents a_1..a_k and shifts t_1..t_k of a shifted moment, with the
    exponent A in |t_j| <= N^A
    """
    a: tuple
    t: tuple
    A: float = 1.0

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        t = tuple(float(v) for v in self.t)
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 't', t)
        if not a:
            raise DomainError("shift spec needs k >= 1 exponents")
        if len(a) != len(t):
            raise DomainError(f"exponents and shifts differ in length ({len(a)} vs {len(t)})")
        if any(not math.isfinite(v) or v <= 0 for v in a):
            raise DomainError(f"exponents must be positive, got {a}")
        if any(not math.isfinite(v) for v in t):
            raise DomainError(f"shifts must be finite, got {t}")
        if not self.A > 0:
            raise DomainError(f"A must be positive, got {self.A}")

    @property
    def k(self):
        return len(self.a)

    @property
    def a_total(self):
        return math.fsum(self.a)

    def scaled(self, s):
        """Same shifts with every exponent multiplied by s > 0"""
        return ShiftSpec(tuple(s * v for v in self.a), self.t, self.A)

    def check_shifts(self, N):
        """|t_j| <= N^A"""
        if N <= 1:
            return
        limit = self.A * math.log(N)
        for t in self.t:
            if t != 0 and math.log(abs(t)) > limit:
                raise DomainError(f"shift |t| = {abs(t):g} exceeds N^A = {N}^{self.A:g}")


@dataclass(frozen=True)
class HarperConfig:
    """
    Ladder alpha_0 = log 2 / log N, alpha_i = 20^{i-1} / (log log N)^2 and its
    length J = 1 + max{i : alpha_i <= 10^-T}
    """
    N: int
    T: float = DEFAULT_T
    lambda_smooth: float = LAMBDA_0
    slack_C: float = DEFAULT_SLACK_C
    alphas: tuple = field(init=False, repr=False)
    J: int = field(init=False)

    def __post_init__(self):
        if self.N < MIN_LEVEL:
            raise ConfigError(f"Harper ladder needs N >= {MIN_LEVEL}, got {self.N}")
        if not self.T > 0:
            raise ConfigError(f"T must be positive, got {self.T}")
        if self.lambda_smooth < LAMBDA_0:
            raise ConfigError(f"lambda_smooth must be >= {LAMBDA_0:.6f}, got {self.lambda_smooth}")
        if self.slack_C < 0:
            raise ConfigError(f"slack_C must be >= 0, got {self.slack_C}")

        cutoff = 10.0 ** (-self.T)
        loglog = self.log_log_N
        alphas = [math.log(2) / self.log_N, 1.0 / loglog**2]
        while alphas[-1] <= cutoff:
            alphas.append(20.0 * alphas[-1])
        passing = [i for i, alpha in enumerate(alphas) if alpha <= cutoff]
        J = 1 + max(passing) if passing else 1
        while len(alphas) <= J:
            alphas.append(20.0 * alphas[-1])
        object.__setattr__(self, 'alphas', tuple(alphas))
        object.__setattr__(self, 'J', J)
        logger.debug("ladder for N=%d, T=%g: J=%d, alphas=%s", self.N, self.T, J,
                     [round(a, 6) for a in alphas[:J + 1]])
        if self.sieve_J < J:
            logger.info("windows %d..%d of the ladder lie beyond the sieve cap and are not computable",
                        self.sieve_J + 1, J)

    @property
    def log_N(self):
        return math.log(self.N)

    @property
    def log_log_N(self):
        return math.log(self.log_N)

    @property
    def p_max_index(self):
        """Largest m in the P_m range, floor(log log N / log 2)"""
        return int(math.floor(self.log_log_N / math.log(2)))

    def alpha(self, i):
        if i < 0 or i >= len(self.alphas):
            raise DomainError(f"ladder index {i} outside 0..{len(self.alphas) - 1}")
        return self.alphas[i]

    def log_threshold(self, i):
        """log N^{alpha_i}"""
        return self.alpha(i) * self.log_N

    def threshold(self, i):
        """N^{alpha_i}; exactly 2 at i = 0"""
        if i == 0:
            return 2.0
        log_x = self.log_threshold(i)
        return math.exp(log_x) if log_x < 700 else math.inf

    @property
    def sieve_J(self):
        """Largest i <= J whose window N^{alpha_{i-1}} < p <= N^{alpha_i} fits under the sieve cap"""
        log_cap = math.log(WINDOW_SIEVE_CAP)
        return max(i for i in range(self.J + 1) if i == 0 or self.log_threshold(i) <= log_cap)


@dataclass(frozen=True, order=True)
class BucketLabel:
    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ('S', 'P'):
            raise DomainError(f"bucket kind must be 'S' or 'P', got {self.kind!r}")

    def __str__(self):
        return f"{self.kind}({self.index})"


# ---------------------------------------------------------------------------
# Shift weights and GRH log-bounds
# ---------------------------------------------------------------------------

def h_weight(spec, n):
    """h(n) = 1/2 sum_m a_m n^{-i t_m}"""
    if n < 1:
        raise DomainError(f"h(n) needs n >= 1, got {n}")
    log_n = math.log(n)
    return 0.5 * sum(a * cmath.exp(-1j * t * log_n) for a, t in zip(spec.a, spec.t))


def h_values(spec, ns):
    """h over an integer array"""
    log_n = np.log(np.asarray(ns, dtype=float))
    a = np.asarray(spec.a)
    t = np.asarray(spec.t)
    return 0.5 * (np.exp(-1j * np.outer(log_n, t)) @ a)


def _check_lambda_smooth(cfg):
    if cfg.lambda_smooth < LAMBDA_0:
        raise DomainError(f"lambda_smooth {cfg.lambda_smooth} below {LAMBDA_0:.6f}")


def lemma25_rhs(f, sigma, t, x, cfg):
    """
    Upper bound for log|L(sigma + it, f)| under GRH

        Re sum_{p^l <= x} (alpha_p^l + beta_p^l) / (l p^{l(s + lambda/log x)}) log(x/p^l)/log x
          + (1 + lambda)(log sqrt(N) + log(|t| + 2)) + slack_C (lambda/log x + 1)

    Args:
        f: Eigenform with lambda(p) stored for p <= x
        sigma: Real part, >= 1/2
        t: Height
        x: Length of the prime sum, >= 2
        cfg: HarperConfig (lambda_smooth, slack_C)

    Returns:
        float
    """
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if sigma < 0.5:
        raise DomainError(f"sigma must be >= 1/2, got {sigma}")
    _check_lambda_smooth(cfg)
    lam = cfg.lambda_smooth
    log_x = math.log(x)
    f.require(int(math.floor(x)), 'lemma25_rhs')
    s = complex(sigma + lam / log_x, t)

    total = 0.0
    for p in primes_up_to(int(math.floor(x))).primes.tolist():
        log_p = math.log(p)
        L = int(math.floor(log_x / log_p + 1e-12))
        u = prime_frame(f, p, L).values
        for l in range(1, L + 1):
            weight = (log_x - l * log_p) / log_x
            total += (u[l] * cmath.exp(-l * s * log_p) / l).real * weight

    archimedean = (1 + lam) * (0.5 * math.log(f.level) + math.log(abs(t) + 2))
    return total + archimedean + cfg.slack_C * (lam / log_x + 1)


def _second_sum(f, spec, limit):
    """Re sum_{p <= limit} h(p^2)(lambda(p^2) - 1) / p"""
    if limit < 2:
        return 0.0
    total = 0.0
    for p in primes_up_to(int(math.floor(limit))).primes.tolist():
        total += (h_weight(spec, p * p) * (prime_power_eigenvalue(f, p, 2) - 1.0) / p).real
    return total


def _prime_weighted_sum(f, spec, primes, exponent, log_x):
    """sum_p 2 h(p) lambda(p) / p^exponent * log(x/p)/log x over the given primes"""
    if len(primes) == 0:
        return 0j
    f.require(int(primes[-1]), 'a prime-window polynomial')
    p = primes.astype(float)
    log_p = np.log(p)
    terms = 2.0 * h_values(spec, primes) * f.coeffs[primes] * np.exp(-exponent * log_p)
    return complex(np.sum(terms * (log_x - log_p) / log_x))


def lemma26_rhs(f, spec, sigma, x, cfg):
    """
    Upper bound for sum_m a_m log|L(sigma + i t_m, f)| under GRH

    Needs x >= 4 and 0 <= sigma - 1/2 <= 2 / log x. The logarithm of the
    conductor is taken as log N with N = cfg.N.
    """
    if x < 4:
        raise DomainError(f"x must be >= 4, got {x}")
    log_x = math.log(x)
    offset = sigma - 0.5
    if offset < 0 or offset > 2.0 / log_x:
        raise DomainError(f"need 0 <= sigma - 1/2 <= 2/log x, got sigma={sigma}, x={x}")
    spec.check_shifts(cfg.N)

    if x > WINDOW_SIEVE_CAP:
        raise RangeError(f"x = {x:.3g} is beyond the sieve cap {WINDOW_SIEVE_CAP:.0e}", required=x)
    f.require(int(math.floor(x)), 'lemma26_rhs')
    primes = primes_up_to(int(math.floor(x))).primes
    first = _prime_weighted_sum(f, spec, primes, 0.5 + max(offset, 1.0 / log_x), log_x).real
    second = _second_sum(f, spec, min(math.sqrt(x), cfg.log_N))
    front = (spec.A + 1) * spec.a_total * cfg.log_N / log_x
    return first - second + front + cfg.slack_C


# ---------------------------------------------------------------------------
# Ladder polynomials
# ---------------------------------------------------------------------------

def _window_primes(lower, upper):
    """Primes in (lower, upper]"""
    if upper > WINDOW_SIEVE_CAP:
        raise RangeError(f"prime window up to {upper:.3g} is beyond the sieve cap "
                         f"{WINDOW_SIEVE_CAP:.0e}", required=upper)
    hi = int(math.floor(upper))
    if hi < 2 or hi <= lower:
        return np.zeros(0, dtype=np.int64)
    return primes_up_to(hi).window(lower, hi)


def m_polynomial(f, spec, cfg, i, j):
    """
    M_{i,j} = sum_{N^{alpha_{i-1}} < p <= N^{alpha_i}} 2 h(p) lambda(p) / p^{1/2 + 1/log N^{alpha_j}}
              * log(N^{alpha_j}/p) / log N^{alpha_j}

    for 1 <= i <= j <= J
    """
    if not 1 <= i <= j <= cfg.J:
        raise DomainError(f"M_(i,j) needs 1 <= i <= j <= J={cfg.J}, got ({i}, {j})")
    log_xj = cfg.log_threshold(j)
    primes = _window_primes(cfg.threshold(i - 1), cfg.threshold(i))
    return _prime_weighted_sum(f, spec, primes, 0.5 + 1.0 / log_xj, log_xj)


def m_prime_polynomial(f, spec, cfg, m, j):
    """First ladder window restricted to 2^{m+1} < p <= N^{alpha_1}, weighted at level j"""
    if not 1 <= j <= cfg.J:
        raise DomainError(f"M'_(1,j) needs 1 <= j <= J={cfg.J}, got j={j}")
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    log_xj = cfg.log_threshold(j)
    primes = _window_primes(2.0 ** (m + 1), cfg.threshold(1))
    return _prime_weighted_sum(f, spec, primes, 0.5 + 1.0 / log_xj, log_xj)


def p_polynomial(f, spec, m, cfg=None):
    """P_m = -sum_{2^m < p <= 2^{m+1}} h(p^2)(lambda(p^2) - 1) / p"""
    upper = cfg.p_max_index if cfg is not None else None
    if m < 0 or (upper is not None and m > upper):
        raise DomainError(f"P_m needs 0 <= m <= {upper}, got m={m}")
    total = 0j
    for p in _window_primes(2 ** m, 2 ** (m + 1)).tolist():
        total -= h_weight(spec, p * p) * (prime_power_eigenvalue(f, p, 2) - 1.0) / p
    return total


@dataclass(frozen=True)
class WindowValues:
    """
    M_{i,l} for 1 <= i <= sieve_J, i <= l <= J and P_m for 0 <= m <= p_max_index

    Windows past the sieve cap have no entry.
    """
    form_id: str
    M: dict
    P: dict


def window_values(f, spec, cfg):
    if cfg.sieve_J < 1:
        raise RangeError(f"first ladder window reaches {cfg.threshold(1):.3g}, beyond the sieve cap",
                         required=cfg.threshold(1))
    M = {(i, l): m_polynomial(f, spec, cfg, i, l)
         for i in range(1, cfg.sieve_J + 1) for l in range(i, cfg.J + 1)}
    P = {m: p_polynomial(f, spec, m, cfg) for m in range(cfg.p_max_index + 1)}
    return WindowValues(f.form_id, M, P)


def m_threshold(cfg, i):
    """alpha_i^{-3/4}"""
    return cfg.alpha(i) ** -0.75


def p_threshold(m):
    """2^{-m/10}"""
    return 2.0 ** (-m / 10.0)


def classify(f, spec, cfg, values=None):
    """
    S- and P-bucket of a form

    S(j): every |M_{i,l}| <= alpha_i^{-3/4} for i <= j, and some window at
    i = j + 1 exceeds its threshold; S(J) when all windows pass. Windows past
    the sieve cap are not computable, so a form passing every computable window
    is labelled S(sieve_J).
    P(m): the largest m with |P_m| > 2^{-m/10}; None when every P_m passes.

    Returns:
        tuple: (BucketLabel, BucketLabel or None)
    """
    values = values or window_values(f, spec, cfg)
    s_index = cfg.sieve_J
    for i in range(1, cfg.sieve_J + 1):
        limit = m_threshold(cfg, i)
        if any(abs(values.M[(i, l)]) > limit for l in range(i, cfg.J + 1)):
            s_index = i - 1
            break

    p_bucket = None
    for m in range(cfg.p_max_index, -1, -1):
        if abs(values.P[m]) > p_threshold(m):
            p_bucket = BucketLabel('P', m)
            break

    s_bucket = BucketLabel('S', s_index)
    logger.debug("%s -> %s, %s", f.form_id, s_bucket, p_bucket)
    return s_bucket, p_bucket


def classify_family(family, spec, cfg, runner=map):
    """Bucket labels in family order"""
    return list(runner(lambda f: classify(f, spec, cfg), family))


def _direct_window_sum(f, spec, lower, upper, log_xj):
    """Plain loop over integers in (lower, upper] with trial-division primality"""
    total = 0j
    for p in range(int(math.floor(lower)) + 1, int(math.floor(upper)) + 1):
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            continue
        h = 0.5 * sum(a * cmath.exp(-1j * t * math.log(p)) for a, t in zip(spec.a, spec.t))
        weight = (log_xj - math.log(p)) / log_xj
        total += 2 * h * f.lam(p) * p ** -(0.5 + 1.0 / log_xj) * weight
    return total


def verify_thresholds(f, spec, cfg, s_bucket):
    """
    Recompute every M_{i,l} with i <= j by a direct loop and confirm the
    thresholds the S(j) label promises

    Windows reaching past DIRECT_LOOP_CAP are left to the sieve path.

    Returns:
        float: the smallest margin alpha_i^{-3/4} - |M_{i,l}| (inf for S(0))
    """
    worst = math.inf
    for i in range(1, s_bucket.index + 1):
        if cfg.threshold(i) > DIRECT_LOOP_CAP:
            logger.info("%s: window %d reaches %.3g, skipped by the direct loop", f.form_id, i,
                        cfg.threshold(i))
            continue
        for l in range(i, cfg.J + 1):
            value = _direct_window_sum(f, spec, cfg.threshold(i - 1), cfg.threshold(i),
                                       cfg.log_threshold(l))
            margin = m_threshold(cfg, i) - abs(value)
            if margin < 0:
                logger.warning("%s labelled %s but |M_(%d,%d)| exceeds its threshold by %.3e",
                               f.form_id, s_bucket, i, l, -margin)
            worst = min(worst, margin)
    return worst


def threshold_margins(family, spec, cfg, values=None):
    """
    One row per (form, i, l) threshold check

    Returns:
        pd.DataFrame: form_id, i, l, abs_M, threshold, margin
    """
    rows = []
    for k, f in enumerate(family):
        v = values[k] if values is not None else window_values(f, spec, cfg)
        for (i, l), value in sorted(v.M.items()):
            limit = m_threshold(cfg, i)
            rows.append({'form_id': f.form_id, 'i': i, 'l': l, 'abs_M': abs(value),
                         'threshold': limit, 'margin': limit - abs(value)})
    return pd.DataFrame(rows, columns=['form_id', 'i', 'l', 'abs_M', 'threshold', 'margin'])


def window_mertens(cfg, cap=WINDOW_SIEVE_CAP):
    """
    sum 1/p over N^{alpha_j} < p <= N^{alpha_{j+1}} for 1 <= j <= J - 1,
    compared with log 20; windows reaching past cap are flagged as not computable

    Returns:
        pd.DataFrame
    """
    rows = []
    target = math.log(20)
    for j in range(1, cfg.J):
        lower, upper = cfg.threshold(j), cfg.threshold(j + 1)
        row = {'j': j, 'lower': lower, 'upper': upper, 'target': target,
               'recip_sum': math.nan, 'deviation': math.nan, 'computable': upper <= cap,
               'within_band': None}
        if upper <= cap:
            value = mertens_sums(upper).recip_sum - (mertens_sums(lower).recip_sum if lower >= 2 else 0.0)
            row.update(recip_sum=value, deviation=value - target,
                       within_band=abs(value - target) <= WINDOW_MERTENS_BAND)
        else:
            logger.info("window %d of the ladder reaches %.3g, beyond the sieve cap", j, upper)
        rows.append(row)
    return pd.DataFrame(rows, columns=['j', 'lower', 'upper', 'target', 'recip_sum',
                                       'deviation', 'computable', 'within_band'])


# ---------------------------------------------------------------------------
# Majorants
# ---------------------------------------------------------------------------

def exp_majorant(z, ell):
    """|E_ell(z/2)|^2, the truncated-exponential surrogate for exp(Re z)"""
    return abs(truncated_exp(ell, complex(z) / 2.0)) ** 2


def majorant_ell(spec, cfg, i):
    """e^2 a alpha_i^{-3/4}"""
    return math.e**2 * spec.a_total * m_threshold(cfg, i)


def _log_abs(value):
    return math.log(value) if value > 0 else -math.inf


def surrogate_log_majorant(f, spec, cfg, s_bucket, p_bucket=None, values=None):
    """
    Log of the per-form majorant chain for prod_m |L(1/2 + i t_m, f)|^{a_m}

        (A+1) a / alpha_j + slack_C + sqrt(2) a - Re sum_{p <= min(sqrt(x_j), log N)} h(p^2)(lambda(p^2)-1)/p
          + sum_{i <= j} log |E_{ell_i}(M_{i,j}/2)|^2

    with x_j = N^{alpha_j}; for a form in P(m) the first window is replaced by
    M'_{1,j} and a 2^{m/2+4} + 2 ceil(2^{m/2}) log(2^{m/10} |P_m|) is added.
    """
    values = values or window_values(f, spec, cfg)
    a = spec.a_total
    j = s_bucket.index
    log_total = (spec.A + 1) * a / cfg.alpha(j) + cfg.slack_C + math.sqrt(2) * a

    x_j = cfg.threshold(j)
    log_total -= _second_sum(f, spec, min(math.sqrt(x_j), cfg.log_N))

    for i in range(1, j + 1):
        if i == 1 and p_bucket is not None:
            z = m_prime_polynomial(f, spec, cfg, p_bucket.index, j)
        else:
            z = values.M[(i, j)]
        log_total += _log_abs(exp_majorant(z, majorant_ell(spec, cfg, i)))

    if p_bucket is not None:
        m = p_bucket.index
        power = 2 * math.ceil(2 ** (m / 2))
        log_total += a * 2 ** (m / 2 + 4) + power * math.log(2 ** (m / 10) * abs(values.P[m]))
    return log_total


def bucket_measure_bounds(family, spec, cfg, labels=None, values=None):
    """
    Counting majorants for the exceptional buckets

        #P(m) <= sum_f (2^{m/10} |P_m(f)|)^{2 ceil(2^{m/2})}
        #S(0) <= sum_f sum_l (alpha_1^{3/4} |M_{1,l}(f)|)^{2 ceil(1/(10 alpha_1))}

    Returns:
        pd.DataFrame: bucket, count, majorant, margin
    """
    values = values or [window_values(f, spec, cfg) for f in family]
    labels = labels or [classify(f, spec, cfg, v) for f, v in zip(family, values)]

    rows = []
    for m in range(cfg.p_max_index + 1):
        power = 2 * math.ceil(2 ** (m / 2))
        majorant = math.fsum((2 ** (m / 10) * abs(v.P[m])) ** power for v in values)
        count = sum(1 for _, p in labels if p == BucketLabel('P', m))
        rows.append({'bucket': str(BucketLabel('P', m)), 'count': count,
                     'majorant': majorant, 'margin': majorant - count})

    alpha_1 = cfg.alpha(1)
    power = 2 * math.ceil(1.0 / (10 * alpha_1))
    majorant = math.fsum((alpha_1 ** 0.75 * abs(v.M[(1, l)])) ** power
                         for v in values for l in range(1, cfg.J + 1))
    count = sum(1 for s, _ in labels if s == BucketLabel('S', 0))
    rows.append({'bucket': str(BucketLabel('S', 0)), 'count': count,
                 'majorant': majorant, 'margin': majorant - count})
    return pd.DataFrame(rows, columns=['bucket', 'count', 'majorant', 'margin'])


# ---------------------------------------------------------------------------
# Tail counts
# ---------------------------------------------------------------------------

def log_abs_l(f, sigma, t, width=DEFAULT_WIDTH):
    """log|L(sigma + it, f)| clamped below at log(tiny)"""
    value = abs(afe_value(f, complex(sigma, t), width=width).value)
    return max(math.log(value), LOG_TINY) if value > 0 else LOG_TINY


def tail_log_values(family, spec, sigma, t, width=DEFAULT_WIDTH, runner=map):
    for f in family:
        if f.level > 1:
            ShiftSpec((1.0,), (t,), spec.A).check_shifts(f.level)
    return np.asarray(list(runner(lambda f: log_abs_l(f, sigma, t, width), family)), dtype=float)


def tail_counts(log_values, V_grid):
    """N(V) = #{f : log|L| >= V} for every V in the grid"""
    log_values = np.asarray(log_values, dtype=float)
    return np.array([int(np.count_nonzero(log_values >= V)) for V in V_grid], dtype=int)


def tail_count(family, spec, sigma, t, V, width=DEFAULT_WIDTH, runner=map):
    """Number of forms with log|L(sigma + it, f)| >= V"""
    log_values = tail_log_values(family, spec, sigma, t, width, runner)
    return int(tail_counts(log_values, [V])[0])


def tail_profile(family, spec, sigma, t, V_grid, N=None, width=DEFAULT_WIDTH, runner=map):
    """
    N(V) over a V-grid next to the reference shape N exp(-4 k V)

    Returns:
        pd.DataFrame: V, count, reference
    """
    N = N or max((f.level for f in family), default=1)
    log_values = tail_log_values(family, spec, sigma, t, width, runner)
    counts = tail_counts(log_values, V_grid)
    V = np.asarray(V_grid, dtype=float)
    with np.errstate(over='ignore'):
        reference = N * np.exp(-4.0 * spec.k * V)
    df = pd.DataFrame({'V': V, 'count': counts, 'reference': reference})
    if np.any(np.diff(counts) > 0) and np.all(np.diff(V) >= 0):
        logger.warning("tail counts are not monotone over the V-grid")
    return df


def v0_threshold(cfg, spec, C0=0.0):
    """
    log V_0 with V_0 = max{e^{10000 (A+1)(k+1)} (log log N + C_0), 8 log log N, 10 (A+1)}
    """
    loglog = cfg.log_log_N
    if loglog + C0 <= 0:
        raise DomainError(f"log log N + C_0 must be positive, got {loglog + C0}")
    candidates = (10000.0 * (spec.A + 1) * (spec.k + 1) + math.log(loglog + C0),
                  math.log(8.0 * loglog),
                  math.log(10.0 * (spec.A + 1)))
    return max(candidates)


def grh_desk_check(forms, spec, cfg, ts=(0.0, 1.0, -1.0, 3.0, -3.0), xs=(50, 100, 500),
                   width=DEFAULT_WIDTH):
    """
    Compare both GRH log-bounds with computed central values

    lemma25 rows: log|L(1/2 + it)| against lemma25_rhs at every (t, x).
    lemma26 rows: sum_m a_m log|L(1/2 + i t_m)| against lemma26_rhs at every x.

    Returns:
        pd.DataFrame: form_id, check, t, x, lhs, rhs, margin
    """
    rows = []
    for f in forms:
        for t in ts:
            lhs = log_abs_l(f, 0.5, t, width)
            for x in xs:
                rhs = lemma25_rhs(f, 0.5, t, x, cfg)
                rows.append({'form_id': f.form_id, 'check': 'lemma25', 't': float(t),
                             'x': float(x), 'lhs': lhs, 'rhs': rhs, 'margin': rhs - lhs})

        lhs = math.fsum(a * log_abs_l(f, 0.5, t, width) for a, t in zip(spec.a, spec.t))
        for x in xs:
            if x < 4:
                continue
            rhs = lemma26_rhs(f, spec, 0.5, x, cfg)
            rows.append({'form_id': f.form_id, 'check': 'lemma26', 't': math.nan,
                         'x': float(x), 'lhs': lhs, 'rhs': rhs, 'margin': rhs - lhs})

    df = pd.DataFrame(rows, columns=['form_id', 'check', 't', 'x', 'lhs', 'rhs', 'margin'])
    for row in df.itertuples():
        logger.debug("%s %s t=%g x=%g margin %.4g", row.form_id, row.check, row.t, row.x, row.margin)
        if row.margin < 0:
            logger.warning("%s: %s bound violated at t=%g, x=%g (margin %.4g)",
                           row.form_id, row.check, row.t, row.x, row.margin)
    return df

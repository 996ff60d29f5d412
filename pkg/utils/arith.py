"""
Arithmetic Infrastructure
Prime sieves, multiplicative functions and Mertens-type prime sums
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from flint import fmpz

from utils.errors import DomainError

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.57721566490153286061
SEGMENT_THRESHOLD = 10**7
SEGMENT_SIZE = 1 << 22


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit`` in ascending order"""
    limit: int
    primes: np.ndarray

    def __len__(self):
        return len(self.primes)

    def __contains__(self, n):
        i = np.searchsorted(self.primes, n)
        return bool(i < len(self.primes) and self.primes[i] == n)

    def up_to(self, x):
        """Primes p <= x (x may exceed nothing beyond ``limit``)"""
        return self.primes[: np.searchsorted(self.primes, x, side='right')]

    def window(self, lower, upper):
        """Primes in the half-open window (lower, upper]"""
        lo = np.searchsorted(self.primes, lower, side='right')
        hi = np.searchsorted(self.primes, upper, side='right')
        return self.primes[lo:hi]


@dataclass(frozen=True)
class MertensSums:
    x: float
    recip_sum: float
    logp_sum: float


def _sieve(limit):
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _segmented_sieve(limit, segment_size=SEGMENT_SIZE):
    # base primes up to sqrt(limit) sieve every later segment
    base = _sieve(math.isqrt(limit))
    chunks = [base]
    low = base[-1] + 1 if len(base) else 2
    # [low, high] blocks of segment_size, one bool mask each
    while low <= limit:
        high = min(low + segment_size - 1, limit)
        mark = np.ones(high - low + 1, dtype=bool)
        for p in base:
            p = int(p)
            if p * p > high:
                break
            # first multiple of p in the block, never below p^2
            start = max(p * p, ((low + p - 1) // p) * p)
            mark[start - low::p] = False
        chunks.append(np.flatnonzero(mark).astype(np.int64) + low)
        low = high + 1
    return np.concatenate(chunks)


def primes_up_to(limit, segmented=None):
    """
    Sieve of Eratosthenes

    Args:
        limit: Largest integer to test (>= 2)
        segmented: Force (True) or forbid (False) the segmented sieve;
            by default it is used above 10^7

    Returns:
        PrimeTable: Ascending primes <= limit
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"primes_up_to needs limit >= 2, got {limit}")
    if segmented is None:
        segmented = limit > SEGMENT_THRESHOLD
    primes = _segmented_sieve(limit) if segmented else _sieve(limit)
    primes.setflags(write=False)
    return PrimeTable(limit=limit, primes=primes)


def smallest_prime_factors(limit):
    """spf[n] = smallest prime dividing n, for 2 <= n <= limit (spf[0] = spf[1] = 0)"""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


def factorize(n):
    """Prime factorization of n >= 1 as {p: exponent}"""
    n = int(n)
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    return {int(p): int(e) for p, e in fmpz(n).factor()}


def multiplicative_fn(kind, n):
    """
    Evaluate d(n), phi(n) or mu(n) exactly

    Args:
        kind: One of 'divisor_count', 'euler_phi', 'mobius'
        n: Positive integer

    Returns:
        int: The function value
    """
    if n < 1:
        raise DomainError(f"{kind} is defined for n >= 1, got {n}")
    factors = factorize(n)

    if kind == 'divisor_count':
        return math.prod(e + 1 for e in factors.values())
    if kind == 'euler_phi':
        return math.prod((p - 1) * p ** (e - 1) for p, e in factors.items())
    if kind == 'mobius':
        if any(e > 1 for e in factors.values()):
            return 0
        return -1 if len(factors) % 2 else 1
    raise DomainError(f"unknown multiplicative function '{kind}'")


def divisor_counts(limit):
    """Array d[0..limit] of divisor counts (d[0] = 0)"""
    counts = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        counts[d::d] += 1
    return counts


def divisor_tail_bound(M, s):
    """
    Integral-comparison estimate of sum_{n > M} d(n) n^{-s} for s > 1,
    using sum_{n <= u} d(n) ~ u log u + (2 gamma - 1) u
    """
    if s <= 1:
        raise DomainError(f"divisor tail diverges for s = {s}")
    M = max(float(M), 1.0)
    k = s - 1.0
    return M ** (-k) * ((math.log(M) + 2 * EULER_GAMMA) / k + 1.0 / k**2)


def mertens_sums(x, compensated=False, table=None):
    """
    Sums over primes p <= x of 1/p and log(p)/p, accumulated in
    ascending prime order

    Args:
        x: Real cutoff >= 2
        compensated: Use math.fsum instead of plain sequential accumulation
        table: Optional PrimeTable already covering x

    Returns:
        MertensSums
    """
    if x < 2:
        raise DomainError(f"mertens_sums needs x >= 2, got {x}")
    if table is None or table.limit < int(x):
        table = primes_up_to(int(x))
    p = table.up_to(x).astype(float)
    recip = 1.0 / p
    logp = np.log(p) / p

    # plain path is left-to-right in ascending p
    if compensated:
        return MertensSums(float(x), math.fsum(recip), math.fsum(logp))
    return MertensSums(float(x), float(np.cumsum(recip)[-1]), float(np.cumsum(logp)[-1]))


def mertens_constant_estimate(limit=10**6):
    """
    Independent estimate of b = gamma + sum_p (log(1 - 1/p) + 1/p)

    The neglected tail sum_{p > limit} is approximated by -1/(2 limit log limit).
    """
    p = primes_up_to(limit).primes.astype(float)
    terms = np.log1p(-1.0 / p) + 1.0 / p
    tail = -1.0 / (2.0 * limit * math.log(limit))
    return EULER_GAMMA + math.fsum(terms) + tail


def _cumulative_prime_sums(xs):
    xs = np.asarray(xs, dtype=float)
    table = primes_up_to(int(xs.max()))
    p = table.primes.astype(float)
    recip = np.cumsum(1.0 / p)
    logp = np.cumsum(np.log(p) / p)
    idx = np.searchsorted(table.primes, xs, side='right') - 1
    return xs, recip[idx], logp[idx]


def fit_logp_constant(xs):
    """Smallest C with |sum_{p<=x} log(p)/p - log x| <= C over the grid xs"""
    xs, _, logp = _cumulative_prime_sums(xs)
    return float(np.max(np.abs(logp - np.log(xs))))


def mertens_table(xs, b_est=None, C=None):
    """
    Margin table for both Mertens sums on a grid of cutoffs

    Returns:
        pd.DataFrame: One row per x with the deviations, bounds and margins
    """
    if b_est is None:
        b_est = mertens_constant_estimate()
    xs, recip, logp = _cumulative_prime_sums(xs)
    if C is None:
        C = float(np.max(np.abs(logp - np.log(xs))))

    df = pd.DataFrame({'x': xs, 'recip_sum': recip, 'logp_sum': logp})
    df['recip_deviation'] = np.abs(recip - np.log(np.log(xs)) - b_est)
    df['recip_bound'] = 5.0 / np.log(xs)
    df['recip_margin'] = df['recip_bound'] - df['recip_deviation']
    df['logp_deviation'] = np.abs(logp - np.log(xs))
    df['logp_bound'] = C
    df['logp_margin'] = C - df['logp_deviation']
    logger.debug("mertens table over %d cutoffs, b_est=%.10f, C=%.6f", len(df), b_est, C)
    return df

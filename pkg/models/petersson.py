"""
Petersson Averages
Empirical eigenvalue sums over a family, the Kloosterman-Bessel main term
with its truncated c-sum, the residual between the two and family-size models
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from utils.arith import divisor_tail_bound
from utils.errors import DomainError
from utils.special import bessel_j, kloosterman

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PeterssonTerm:
    kappa: int
    N: int
    n: int
    Y: float
    c_max: int
    main_term: float
    kloosterman_tail: float
    truncation_estimate: float

    @property
    def value(self):
        return self.main_term + self.kloosterman_tail


def _family_signature(family):
    signatures = {(f.weight, f.level) for f in family}
    if len(signatures) > 1:
        raise DomainError(f"family mixes (weight, level) pairs: {sorted(signatures)}")
    return signatures.pop() if signatures else None


def delta_star_empirical(family, n):
    """Sum of lambda_f(n) over the family, in family order"""
    _family_signature(family)
    total = 0.0
    for f in family:
        total += f.lam(n)
    return total


def default_c_max(N, n, Y=1.0):
    return int(100 * N * math.ceil(math.sqrt(n)) * math.ceil(Y))


def square_indicator(n, Y):
    """m if n = m^2 with m <= Y, else 0"""
    m = math.isqrt(n)
    return m if m * m == n and m <= Y else 0


def _check_level_condition(N, n):
    # (n, N^2) | N
    if N > 1 and N % math.gcd(n, N * N) != 0:
        raise DomainError(f"(n, N^2) must divide N, got n={n}, N={N}")


def _tail_bound(kappa, N, n, m, R):
    """
    Estimate of the dropped c = N r, r > R part for one m via the Weil-Estermann
    bound |S| <= d(c) gcd^{1/2} c^{1/2} and J_nu(x) <= (x/2)^nu / Gamma(nu + 1)
    """
    nu = kappa - 1
    s = nu + 0.5
    log_front = nu * math.log(2 * math.pi * m * math.sqrt(n)) - math.lgamma(kappa)
    # d(N r) <= 2 d(r)
    divisor_tail = divisor_tail_bound(R, s)
    return math.exp(log_front) * math.sqrt(n) * 2.0 * N ** (-s) * divisor_tail


def delta_prime(kappa, N, n, Y=1.0, c_max=None):
    """
    Main term and Kloosterman-Bessel tail

    Args:
        kappa: Even weight
        N: Prime level (or 1)
        n: Positive integer with (n, N^2) | N
        Y: Square-detection bound for the main term
        c_max: Largest modulus in the c-sum (default 100 N ceil(sqrt n) Y)

    Returns:
        PeterssonTerm
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    _check_level_condition(N, n)
    if c_max is None:
        c_max = default_c_max(N, n, Y)
    if c_max < N:
        raise DomainError(f"c_max = {c_max} must be >= N = {N}")

    scale = (kappa - 1) * N / 12.0
    root = square_indicator(n, Y)
    main = scale / math.sqrt(n) if root else 0.0

    sign = -1.0 if (kappa // 2) % 2 else 1.0
    R = c_max // N
    tail = 0.0
    estimate = 0.0
    for m in range(1, int(math.floor(Y)) + 1):
        if math.gcd(m, N) != 1:
            continue
        inner = 0.0
        for c in range(N, R * N + 1, N):
            x = 4 * math.pi * m * math.sqrt(n) / c
            inner += kloosterman(m * m, n, c) / c * bessel_j(kappa - 1, x)
        tail += scale * (2 * math.pi * sign / m) * inner
        estimate += scale * (2 * math.pi / m) * _tail_bound(kappa, N, n, m, R)

    logger.debug("delta_prime(kappa=%d, N=%d, n=%d): main=%.6g tail=%.6g est=%.3e",
                 kappa, N, n, main, tail, estimate)
    return PeterssonTerm(kappa=kappa, N=N, n=n, Y=float(Y), c_max=int(c_max), main_term=main,
                         kloosterman_tail=tail, truncation_estimate=estimate)


def delta_infty_residual(family, n, Y=1.0, c_max=None, kappa=None, N=None):
    """
    Empirical residual Delta*(n) - Delta'(n)

    kappa and N are read from the family; pass them explicitly for an empty family.
    """
    signature = _family_signature(family)
    if signature is None:
        if kappa is None or N is None:
            raise DomainError("empty family needs explicit kappa and N")
        signature = (kappa, N)
    kappa, N = signature
    return delta_star_empirical(family, n) - delta_prime(kappa, N, n, Y, c_max).value


def family_size_model(kappa, N):
    """
    (kappa - 1) N / 12 model for the number of newforms, with the error band
    (kappa N)^{5/6}

    Returns:
        tuple: (model, band)
    """
    if N <= 1:
        raise DomainError(f"family size model needs N > 1, got {N}")
    return (kappa - 1) * N / 12.0, (kappa * N) ** (5.0 / 6.0)


def sign_class_sizes(family):
    """
    Split the family by root number and compare each class with (kappa-1)N/24

    Returns:
        dict: plus, minus, per-class model and band
    """
    signature = _family_signature(family)
    plus = sum(1 for f in family if f.root_number > 0)
    minus = len(family) - plus
    out = {'plus': plus, 'minus': minus}
    if signature is not None and signature[1] > 1:
        model, band = family_size_model(*signature)
        out.update({'class_model': model / 2.0, 'band': band})
    return out


def average_shape_report(family, ns=(1, 2, 3, 4, 9), Y=None, c_max=None):
    """
    Soft check |Delta*/|family| - delta_{n,square}/sqrt(n)| against the
    truncation estimate plus the family-size band divided by |family|

    Returns:
        pd.DataFrame: one row per n (reported, never raised)
    """
    signature = _family_signature(family)
    if signature is None:
        raise DomainError("average_shape_report needs a nonempty family")
    kappa, N = signature
    size = len(family)
    band = family_size_model(kappa, N)[1] if N > 1 else 0.0
    rows = []
    for n in ns:
        if N > 1 and math.gcd(n, N) != 1:
            continue
        y = Y if Y is not None else max(1.0, math.isqrt(n))
        term = delta_prime(kappa, N, n, y, c_max)
        indicator = 1.0 if square_indicator(n, y) else 0.0
        lhs = abs(delta_star_empirical(family, n) / size - indicator / math.sqrt(n))
        rhs = term.truncation_estimate + band / size
        rows.append({'n': n, 'lhs': lhs, 'rhs': rhs, 'margin': rhs - lhs})
    df = pd.DataFrame(rows)
    if len(df) and (df['margin'] < 0).any():
        logger.info("average shape check exceeded for n in %s", df.loc[df['margin'] < 0, 'n'].tolist())
    return df


def truncation_profile(kappa, N, n, Y, c_values):
    """Truncation estimates at several c_max values (must be nonincreasing)"""
    estimates = [delta_prime(kappa, N, n, Y, c).truncation_estimate for c in c_values]
    return np.asarray(estimates)

"""
Special Functions
Kloosterman sums, J-Bessel, truncated exponentials and complex log-gamma
"""
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as sp

from utils.errors import DomainError, RangeError

logger = logging.getLogger(__name__)

KLOOSTERMAN_MAX_MODULUS = 10**7
BESSEL_MAX_ORDER = 200
BESSEL_MAX_ARGUMENT = 1e6
BESSEL_SWITCH_GAP = 10
TRUNCATED_EXP_MAX_TERMS = 10**4


@dataclass(frozen=True)
class KloostermanValue:
    m: int
    n: int
    c: int
    value: float


def unit_inverses(c):
    """
    Units modulo c together with their inverses, by a vectorized
    extended Euclidean algorithm

    Returns:
        tuple: (units, inverses) as int64 arrays
    """
    u = np.arange(1, c + 1, dtype=np.int64) % c
    units = u[np.gcd(u, c) == 1] if c > 1 else np.zeros(1, dtype=np.int64)
    if c == 1:
        return units, units.copy()

    r0 = np.full(len(units), c, dtype=np.int64)
    r1 = units.copy()
    s0 = np.zeros(len(units), dtype=np.int64)
    s1 = np.ones(len(units), dtype=np.int64)
    while np.any(r1 != 0):
        live = r1 != 0
        q = np.where(live, r0 // np.where(live, r1, 1), 0)
        r0, r1 = np.where(live, r1, r0), np.where(live, r0 - q * r1, r1)
        s0, s1 = np.where(live, s1, s0), np.where(live, s0 - q * s1, s1)
    return units, s0 % c


def kloosterman_sum(m, n, c):
    """
    S(m, n; c) = sum over units u mod c of e((m u + n u^{-1}) / c)

    Args:
        m, n: Integers
        c: Modulus, 1 <= c <= 10^7

    Returns:
        KloostermanValue
    """
    c = int(c)
    if c < 1:
        raise DomainError(f"Kloosterman modulus must be >= 1, got {c}")
    if c > KLOOSTERMAN_MAX_MODULUS:
        raise RangeError(f"Kloosterman modulus {c} above cap", required=c)
    if c == 1:
        return KloostermanValue(m, n, c, 1.0)

    units, inverses = unit_inverses(c)
    # residues reduced first so the products stay inside int64
    phase = ((m % c) * units + (n % c) * inverses) % c
    total = np.exp(2j * np.pi * phase / c).sum()
    if abs(total.imag) > 1e-10 * max(1.0, len(units)):
        raise RangeError(f"S({m},{n};{c}) has imaginary part {total.imag:.3e}")
    return KloostermanValue(m, n, c, float(total.real))


def kloosterman(m, n, c):
    """Real value of S(m, n; c)"""
    return kloosterman_sum(m, n, c).value


def _check_bessel_domain(order, x):
    if order < 0 or int(order) != order:
        raise DomainError(f"Bessel order must be a nonnegative integer, got {order}")
    if x < 0:
        raise DomainError(f"Bessel argument must be >= 0, got {x}")
    if order > BESSEL_MAX_ORDER or x > BESSEL_MAX_ARGUMENT:
        raise RangeError(f"J_{order}({x}) outside the supported range (order <= 200, x <= 1e6)")


def bessel_j_series(order, x):
    """
    J_order(x) from the power series, summed in mpmath at a working
    precision that absorbs the cancellation (about x/2 extra digits)
    """
    order = int(order)
    if x == 0:
        return 1.0 if order == 0 else 0.0
    dps = 20 + int(math.ceil(0.5 * x))
    with mpmath.workdps(dps):
        half = mpmath.mpf(x) / 2
        term = half ** order / mpmath.factorial(order)
        total = term
        q = -half * half
        k = 0
        eps = mpmath.mpf(10) ** (-dps)
        while True:
            k += 1
            term = term * q / (k * (k + order))
            total += term
            if abs(term) <= eps * abs(total) and k > half:
                break
        return float(total)


def bessel_j_recurrence(order, x):
    """
    J_order(x) by Miller's downward recurrence normalized with
    J_0 + 2 sum_k J_2k = 1
    """
    order = int(order)
    if x == 0:
        return 1.0 if order == 0 else 0.0
    start = int(max(order, x) + 30 + 12 * max(order, x) ** (1.0 / 3))
    start += start % 2

    j_next, j_curr = 0.0, 1e-300
    result = 0.0
    norm = 0.0
    for k in range(start, 0, -1):
        j_prev = 2.0 * k / x * j_curr - j_next
        j_next, j_curr = j_curr, j_prev
        if abs(j_curr) > 1e250:
            j_next *= 1e-250
            j_curr *= 1e-250
            result *= 1e-250
            norm *= 1e-250
        if k - 1 == order:
            result = j_curr
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_curr
    norm += j_curr
    return result / norm


def bessel_j(order, x):
    """
    J_order(x) for integer order <= 200 and 0 <= x <= 10^6

    Power series below x = order + 10, downward recurrence above.
    """
    _check_bessel_domain(order, x)
    if x <= order + BESSEL_SWITCH_GAP:
        return bessel_j_series(order, x)
    return bessel_j_recurrence(order, x)


def truncated_exp(ell, z):
    """
    E_ell(z) = sum_{j=0}^{ceil(ell)} z^j / j!, evaluated by Horner's rule

    Args:
        ell: Nonnegative real truncation parameter
        z: Real or complex argument

    Returns:
        complex
    """
    if ell < 0:
        raise DomainError(f"truncated_exp needs ell >= 0, got {ell}")
    terms = math.ceil(ell)
    if terms > TRUNCATED_EXP_MAX_TERMS:
        raise RangeError(f"ceil(ell) = {terms} exceeds {TRUNCATED_EXP_MAX_TERMS}",
                         required=terms)
    z = complex(z)
    r = 1.0 + 0j
    for j in range(terms, 0, -1):
        r = 1.0 + z * r / j
    return r


def log_gamma(z):
    """Principal branch of log Gamma(z); poles at 0, -1, -2, ... raise DomainError"""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise DomainError(f"Gamma has a pole at {z.real:g}")
    return complex(sp.loggamma(z))


def log_gamma_array(z):
    """Vectorized principal log Gamma for arrays that avoid the poles"""
    return sp.loggamma(np.asarray(z, dtype=complex))


def majorization_probe(ells=(10, 20, 50), samples=500, seed=0):
    """
    Sample z in the disc |z| <= ell/10 and test
    exp(2 Re z) <= 1.01 |E_ell(z)|^2 e^{0.01}

    Returns:
        dict: Per-ell sample counts, failures and the worst log-margin
    """
    rng = np.random.default_rng(seed)
    report = {}
    for ell in ells:
        radius = ell / 10.0
        r = radius * np.sqrt(rng.random(samples))
        theta = 2 * np.pi * rng.random(samples)
        worst = math.inf
        failures = 0
        for z in r * np.exp(1j * theta):
            lhs = 2.0 * z.real
            rhs = math.log(1.01) + 0.01 + 2.0 * math.log(abs(truncated_exp(ell, z)))
            margin = rhs - lhs
            worst = min(worst, margin)
            if margin < 0:
                failures += 1
                logger.warning("majorization failed at ell=%s, z=%s (margin %.3e)", ell, z, margin)
        report[ell] = {'samples': samples, 'failures': failures, 'worst_margin': worst}
    return report

"""
Hecke Eigenforms
Built-in exact q-expansion generators, coefficient-file ingestion,
synthetic Hecke sequences and the Hecke algebra on normalized eigenvalues
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import mpmath
import numpy as np
from flint import fmpz_poly

from utils.arith import (divisor_counts, factorize, multiplicative_fn, primes_up_to,
                         smallest_prime_factors)
from utils.errors import DataError, DomainError, RangeError
from utils.file_parser import CoefficientFileParser, write_coefficient_file

logger = logging.getLogger(__name__)

HECKE_TOLERANCE = 1e-9
ROOT_NUMBER_TOLERANCE = 1e-6
ROOT_NUMBER_REJECT = 1e-3
VALIDATION_LIMIT = 10**4

BUILTIN_FORMS = {
    'delta12': (1, 12),
    'level1_weight16': (1, 16),
    'level1_weight18': (1, 18),
    'level1_weight20': (1, 20),
    'level1_weight22': (1, 22),
    'level1_weight26': (1, 26),
    'level11_weight2': (11, 2),
}

BUILTIN_SETS = {
    'level1': ('delta12', 'level1_weight16', 'level1_weight18', 'level1_weight20',
               'level1_weight22', 'level1_weight26'),
    'level11': ('level11_weight2',),
}
BUILTIN_SETS['all'] = BUILTIN_SETS['level1'] + BUILTIN_SETS['level11']


@dataclass(frozen=True, eq=False)
class Eigenform:
    """
    Normalized Hecke eigenvalue sequence of a newform

    coeffs[n] = lambda_f(n) for 1 <= n <= n_max; coeffs[0] is unused.
    """
    form_id: str
    level: int
    weight: int
    coeffs: np.ndarray
    root_number: float
    source: str = 'builtin'

    @property
    def n_max(self):
        return len(self.coeffs) - 1

    def lam(self, n):
        if n < 1 or n > self.n_max:
            raise RangeError(f"{self.form_id}: lambda({n}) outside stored range 1..{self.n_max}",
                             required=n)
        return float(self.coeffs[n])

    def chi0(self, p):
        """Principal character modulo the level"""
        return 0 if self.level % p == 0 else 1

    def require(self, n_max, purpose=''):
        if n_max > self.n_max:
            what = f" for {purpose}" if purpose else ''
            raise RangeError(f"{self.form_id}: need n_max >= {n_max}{what}, have {self.n_max}",
                             required=int(n_max))


@dataclass(frozen=True, eq=False)
class PrimeFrame:
    """Power sums u_l = alpha_p^l + beta_p^l for l = 0..L"""
    p: int
    values: np.ndarray


# ---------------------------------------------------------------------------
# Exact q-expansions
# ---------------------------------------------------------------------------

def _euler_series(n_terms, step=1):
    """Coefficients of prod_{n>=1} (1 - q^{step n}) up to q^{n_terms - 1}"""
    coeffs = [0] * n_terms
    coeffs[0] = 1
    k = 1
    while step * k * (3 * k - 1) // 2 < n_terms:
        sign = -1 if k % 2 else 1
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if step * g < n_terms:
                coeffs[step * g] += sign
        k += 1
    return fmpz_poly(coeffs)


def _truncate(poly, n_terms):
    return fmpz_poly(poly.coeffs()[:n_terms])


def _mul_trunc(a, b, n_terms):
    return _truncate(a * b, n_terms)


def _pow_trunc(poly, e, n_terms):
    result = fmpz_poly([1])
    base = poly
    while e:
        if e & 1:
            result = _mul_trunc(result, base, n_terms)
        e >>= 1
        if e:
            base = _mul_trunc(base, base, n_terms)
    return result


def bernoulli(n):
    """B_n as an exact Fraction"""
    p, q = mpmath.bernfrac(n)
    return Fraction(int(p), int(q))


def eisenstein_series(k, n_terms):
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n as exact integers"""
    if k < 4 or k % 2:
        raise DomainError(f"Eisenstein series needs even k >= 4, got {k}")
    scale = Fraction(-2 * k) / bernoulli(k)
    if scale.denominator != 1:
        raise DomainError(f"E_{k} does not have integral coefficients")
    scale = int(scale)

    sigma = [0] * n_terms
    for d in range(1, n_terms):
        dk = d ** (k - 1)
        for m in range(d, n_terms, d):
            sigma[m] += dk
    return fmpz_poly([1] + [scale * s for s in sigma[1:]])


def _exact_coefficients(form_id, n_max):
    """a_f(1..n_max) as Python ints"""
    level, weight = BUILTIN_FORMS[form_id]
    n_terms = n_max

    if level == 1:
        eta24 = _pow_trunc(_euler_series(n_terms), 24, n_terms)
        series = eta24 if weight == 12 else _mul_trunc(eta24, eisenstein_series(weight - 12, n_terms), n_terms)
    else:
        square = _pow_trunc(_euler_series(n_terms), 2, n_terms)
        square11 = _pow_trunc(_euler_series(n_terms, step=level), 2, n_terms)
        series = _mul_trunc(square, square11, n_terms)

    coeffs = [int(c) for c in series.coeffs()]
    coeffs += [0] * (n_terms - len(coeffs))
    # the q prefactor shifts the index by one
    return coeffs[:n_max]


def normalize_coefficients(raw, weight):
    """lambda(n) = a(n) / n^{(kappa-1)/2}, exact division by n^{(kappa-2)/2} first"""
    half = (weight - 2) // 2
    out = np.empty(len(raw) + 1)
    out[0] = np.nan
    for n, a in enumerate(raw, start=1):
        out[n] = float(Fraction(a, n ** half)) / math.sqrt(n)
    return out


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------

def _prime_power_split(limit):
    """For 2 <= n <= limit: p = spf(n), pk = exact power of p in n, m = n / pk"""
    spf = smallest_prime_factors(limit)
    n = np.arange(2, limit + 1, dtype=np.int64)
    p = spf[n]
    pk = p.copy()
    while True:
        more = (n // pk) % p == 0
        if not more.any():
            break
        pk[more] *= p[more]
    return n, p, pk, n // pk


def root_number_value(level, weight, lam_level=1.0):
    """epsilon_f = i^kappa mu(N) lambda_f(N) N^{1/2}, with i^kappa = (-1)^{kappa/2}"""
    sign = -1.0 if (weight // 2) % 2 else 1.0
    if level == 1:
        return sign
    return sign * multiplicative_fn('mobius', level) * lam_level * math.sqrt(level)


def _checked_root_number(form_id, level, weight, coeffs):
    if level > 1 and level > len(coeffs) - 1:
        raise RangeError(f"{form_id}: root number needs lambda({level})", required=level)
    value = root_number_value(level, weight, coeffs[level] if level > 1 else 1.0)
    if abs(abs(value) - 1.0) > ROOT_NUMBER_REJECT:
        raise DataError(f"{form_id}: root number {value:.6g} is not +-1", n=level,
                        invariant='root_number')
    if abs(abs(value) - 1.0) > ROOT_NUMBER_TOLERANCE:
        logger.warning("%s: root number %.9f rounded to %+d", form_id, value, int(np.sign(value)))
    return float(np.sign(value))


def validate_sequence(coeffs, level, form_id='sequence', limit=VALIDATION_LIMIT,
                      tol=HECKE_TOLERANCE):
    """
    Check lambda(1) = 1, the Deligne bound, multiplicativity, the prime-power
    recursion and |lambda(N)| = N^{-1/2} for n <= min(n_max, limit)

    Raises:
        DataError: naming the invariant and the first offending n
    """
    L = min(len(coeffs) - 1, limit)
    lam = np.asarray(coeffs[:L + 1], dtype=float)

    if abs(lam[1] - 1.0) > tol:
        raise DataError(f"{form_id}: lambda(1) = {lam[1]:.12g} != 1", n=1, invariant='lambda(1)=1')
    if L < 2:
        return

    d = divisor_counts(L)
    bad = np.flatnonzero(np.abs(lam[1:]) > d[1:] + tol)
    if bad.size:
        n = int(bad[0]) + 1
        raise DataError(f"{form_id}: Deligne bound violated at n={n}: "
                        f"|lambda|={abs(lam[n]):.12g} > d(n)={d[n]}", n=n, invariant='deligne')

    n, p, pk, m = _prime_power_split(L)
    split = m > 1
    err = np.abs(lam[n[split]] - lam[pk[split]] * lam[m[split]])
    bad = np.flatnonzero(err > tol)
    if bad.size:
        k = int(n[split][bad[0]])
        raise DataError(f"{form_id}: multiplicativity fails at n={k} (error {err[bad[0]]:.3e})",
                        n=k, invariant='hecke')

    powers = (m == 1) & (pk > p)
    q, qk = p[powers], pk[powers]
    chi = (level % q != 0).astype(float)
    err = np.abs(lam[qk] - (lam[q] * lam[qk // q] - chi * lam[qk // q // q]))
    bad = np.flatnonzero(err > tol)
    if bad.size:
        k = int(qk[bad[0]])
        raise DataError(f"{form_id}: prime-power recursion fails at n={k} (error {err[bad[0]]:.3e})",
                        n=k, invariant='hecke')

    if level > 1 and level <= L:
        expected = level ** -0.5
        if abs(abs(lam[level]) - expected) > tol * max(1.0, expected) + 1e-12:
            raise DataError(f"{form_id}: |lambda({level})| = {abs(lam[level]):.12g}, "
                            f"expected {expected:.12g}", n=level, invariant='lambda(N)')


def is_admissible_level(level):
    """Level 1 or a prime"""
    return level == 1 or (level >= 2 and factorize(level) == {level: 1})


def _make_form(form_id, level, weight, coeffs, source):
    coeffs = np.asarray(coeffs, dtype=float)
    coeffs.setflags(write=False)
    eps = _checked_root_number(form_id, level, weight, coeffs)
    if level > 1:
        logger.info("%s: level %d, taking |lambda(N)| = N^(-1/2) (root number %+d)",
                    form_id, level, int(eps))
    return Eigenform(form_id=form_id, level=level, weight=weight, coeffs=coeffs,
                     root_number=eps, source=source)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def builtin_form(form_id, n_max):
    """
    Exact built-in eigenform, normalized

    Args:
        form_id: One of BUILTIN_FORMS
        n_max: Number of coefficients to keep

    Returns:
        Eigenform
    """
    if form_id not in BUILTIN_FORMS:
        raise DomainError(f"unknown builtin form '{form_id}' (known: {', '.join(BUILTIN_FORMS)})")
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    level, weight = BUILTIN_FORMS[form_id]

    # generate at least up to the level so the root number is available
    raw = _exact_coefficients(form_id, max(n_max, level))
    full = normalize_coefficients(raw, weight)
    eps = _checked_root_number(form_id, level, weight, full)
    coeffs = full[:n_max + 1].copy()
    coeffs.setflags(write=False)
    logger.debug("built %s with %d coefficients", form_id, n_max)
    return Eigenform(form_id=form_id, level=level, weight=weight, coeffs=coeffs,
                     root_number=eps, source='builtin')


def builtin_family(set_name, n_max):
    if set_name not in BUILTIN_SETS:
        raise DomainError(f"unknown builtin set '{set_name}'")
    return [builtin_form(form_id, n_max) for form_id in BUILTIN_SETS[set_name]]


def synthetic_form(level, weight, n_max, seed=0, sign=None, form_id=None):
    """
    Random Hecke-consistent eigenvalue sequence

    lambda(p) = 2 cos(theta_p) with theta_p uniform on [0, pi] for p not dividing
    the level, lambda(N) = +-N^{-1/2}, extended by the prime-power recursion
    and multiplicativity.
    """
    if not is_admissible_level(level):
        raise DomainError(f"synthetic forms need level 1 or prime, got {level}")
    n_max = max(int(n_max), level)
    rng = np.random.default_rng(seed)

    lam = np.zeros(n_max + 1)
    lam[0] = np.nan
    lam[1] = 1.0
    if n_max >= 2:
        for p in primes_up_to(n_max).primes.tolist():
            if p == level:
                s = sign if sign is not None else (1 if rng.random() < 0.5 else -1)
                lp, chi = s / math.sqrt(level), 0.0
            else:
                lp, chi = 2.0 * math.cos(math.pi * rng.random()), 1.0
            lam[p] = lp
            prev2, prev, pk = 1.0, lp, p
            while pk * p <= n_max:
                pk *= p
                prev2, prev = prev, lp * prev - chi * prev2
                lam[pk] = prev

        n, _, pk, m = _prime_power_split(n_max)
        for i in np.flatnonzero(m > 1):
            lam[n[i]] = lam[pk[i]] * lam[m[i]]

    form_id = form_id or f"synthetic_N{level}_k{weight}_s{seed}"
    return _make_form(form_id, level, weight, lam, 'synthetic')


def load_coefficients(path, form_id=None):
    """
    Read and validate a coefficient file

    Args:
        path: File in the '#meta ...' line format
        form_id: Identifier to attach (defaults to the file stem)

    Returns:
        Eigenform
    """
    parser = CoefficientFileParser()
    parsed = parser.parse_file(path)
    form_id = form_id or Path(path).stem
    level, weight = parsed['level'], parsed['weight']
    if weight < 2 or weight % 2:
        raise DataError(f"{form_id}: weight must be even and >= 2, got {weight}", invariant='weight')
    if not is_admissible_level(level):
        raise DataError(f"{form_id}: level must be 1 or prime, got {level}", invariant='level')

    validate_sequence(parsed['coeffs'], level, form_id=form_id)
    logger.info("loaded %s: level=%d weight=%d n_max=%d", form_id, level, weight, parsed['count'])
    return _make_form(form_id, level, weight, parsed['coeffs'], 'file')


def write_coefficients(f, path):
    write_coefficient_file(path, f.level, f.weight, f.coeffs)


# ---------------------------------------------------------------------------
# Hecke algebra
# ---------------------------------------------------------------------------

def _divisors(n):
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def hecke_product(f, m, n):
    """
    sum over d | (m, n), (d, N) = 1 of lambda(mn/d^2)

    Equals lambda(m) lambda(n) for a genuine eigenform.
    """
    if m < 1 or n < 1:
        raise DomainError(f"hecke_product needs positive indices, got ({m}, {n})")
    f.require(m * n, 'hecke_product')
    total = 0.0
    for d in _divisors(math.gcd(m, n)):
        if math.gcd(d, f.level) == 1:
            total += f.lam(m * n // (d * d))
    return total


def prime_power_eigenvalue(f, p, k):
    """lambda(p^k), from storage when p^k <= n_max else by the Hecke recursion"""
    if p**k <= f.n_max:
        return f.lam(p**k)
    lp = f.lam(p)
    chi = f.chi0(p)
    prev2, prev = 1.0, lp
    for _ in range(k - 1):
        prev2, prev = prev, lp * prev - chi * prev2
    return prev if k >= 1 else 1.0


def power_expansion_terms(e):
    """
    [(coefficient, exponent)] with lambda(p)^e = sum coefficient * lambda(p^exponent)
    for p not dividing the level
    """
    half, odd = divmod(e, 2)
    terms = []
    for r in range(half + 1):
        upper = math.comb(e, half - r)
        lower = math.comb(e, half - r - 1) if half - r - 1 >= 0 else 0
        terms.append((upper - lower, 2 * r + odd))
    return terms


def power_expansion(f, p, e):
    """lambda(p)^e evaluated through the binomial-difference expansion"""
    if f.level % p == 0:
        raise DomainError(f"power_expansion needs p not dividing the level ({p} | {f.level})")
    if e < 0:
        raise DomainError(f"exponent must be >= 0, got {e}")
    return math.fsum(c * prime_power_eigenvalue(f, p, k) for c, k in power_expansion_terms(e))


def prime_frame(f, p, L):
    """PrimeFrame u_0..u_L by u_l = lambda(p) u_{l-1} - chi_0(p) u_{l-2}"""
    lp = f.lam(p)
    chi = f.chi0(p)
    values = np.empty(L + 1)
    values[0] = 2.0
    if L >= 1:
        values[1] = lp
    for l in range(2, L + 1):
        values[l] = lp * values[l - 1] - chi * values[l - 2]
    values.setflags(write=False)
    return PrimeFrame(p=p, values=values)


def root_number(f):
    """Recompute epsilon_f from the stored coefficients and check it against the form"""
    eps = _checked_root_number(f.form_id, f.level, f.weight, f.coeffs)
    if eps != f.root_number:
        raise DataError(f"{f.form_id}: stored root number {f.root_number:+g} disagrees "
                        f"with recomputed {eps:+g}", n=f.level, invariant='root_number')
    return eps


def deligne_margins(f, limit=None):
    """Smallest d(n) - |lambda(n)| over n <= limit and the n attaining it"""
    L = min(f.n_max, limit or f.n_max)
    d = divisor_counts(L)
    margin = d[1:] - np.abs(f.coeffs[1:L + 1])
    i = int(np.argmin(margin))
    return float(margin[i]), i + 1

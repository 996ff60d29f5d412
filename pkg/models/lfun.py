"""
L-function Evaluation
Dirichlet series and Euler product in the half-plane of absolute convergence,
and a smoothed approximate functional equation everywhere else.

The completed function is

    Lambda(s, f) = (sqrt(N) / 2 pi)^s Gamma(s + (kappa - 1)/2) L(s, f) = eps_f Lambda(1 - s, f)

and for a smoothing G(w) = exp((w / width)^2)

    L(s) = sum_n lambda(n) n^-s V_s(n) + eps_f X(s) sum_n lambda(n) n^-(1-s) V_{1-s}(n)

with X(s) = gamma(1 - s) / gamma(s) and

    V_u(y) = 1/(2 pi i) int_(c) gamma(u + w) / gamma(u) y^-w G(w) dw / w

evaluated by the trapezoidal rule on the vertical line Re w = c.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from models.forms import prime_frame
from utils.arith import divisor_tail_bound, primes_up_to
from utils.errors import DomainError
from utils.special import log_gamma, log_gamma_array

logger = logging.getLogger(__name__)

CONTOUR_SHIFT = 1.5
DEFAULT_WIDTH = 4.0
ALTERNATE_WIDTH = 3.0
QUADRATURE_STEP = 0.1
TERMS_FACTOR = 50
MAX_ABS_T = 1e4
TAIL_SHIFTS = (4.0, 8.0, 12.0, 16.0, 24.0, 32.0)
EULER_TERM_CUTOFF = 1e-17
ROUNDING_FLOOR = 64 * np.finfo(float).eps
CHUNK_CELLS = 2_000_000


@dataclass(frozen=True)
class LValue:
    s: complex
    value: complex
    method: str
    trunc_error: float


@dataclass(frozen=True)
class CompletedValue:
    s: complex
    lambda_value: complex


def gamma_shift(f):
    """(kappa - 1) / 2"""
    return (f.weight - 1) / 2.0


def log_conductor(f):
    """log(sqrt(N) / 2 pi)"""
    return 0.5 * math.log(f.level) - math.log(2 * math.pi)


def log_gamma_factor(f, s):
    """log of (sqrt(N)/2 pi)^s Gamma(s + (kappa-1)/2)"""
    s = complex(s)
    return s * log_conductor(f) + log_gamma(s + gamma_shift(f))


def required_terms(f, t):
    """Coefficient count needed by the approximate functional equation at height t"""
    return int(math.ceil(TERMS_FACTOR * math.sqrt(f.level) * (1.0 + abs(t))))


def _sum(values, compensated):
    if compensated:
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return complex(np.sum(values))


def dirichlet_partial(f, s, n_max=None, compensated=False):
    """
    Partial Dirichlet series sum_{n <= n_max} lambda(n) n^-s

    Args:
        f: Eigenform
        s: Complex point with Re s > 1
        n_max: Number of terms (defaults to every stored coefficient)
        compensated: Accumulate with math.fsum

    Returns:
        LValue: trunc_error estimates sum_{n > n_max} d(n) n^-sigma
    """
    s = complex(s)
    if s.real <= 1:
        raise DomainError(f"Dirichlet series needs Re s > 1, got {s}")
    n_max = f.n_max if n_max is None else int(n_max)
    f.require(n_max, 'dirichlet_partial')
    n = np.arange(1, n_max + 1, dtype=float)
    terms = f.coeffs[1:n_max + 1] * np.exp(-s * np.log(n))
    value = _sum(terms, compensated)
    return LValue(s, value, 'dirichlet', divisor_tail_bound(n_max, s.real))


def euler_product_log(f, s, p_max):
    """
    log prod_{p <= p_max} L_p(s, f) as sum_p sum_l u_l / (l p^{ls})

    Args:
        f: Eigenform with lambda(p) stored for p <= p_max
        s: Complex point with Re s > 1
        p_max: Largest prime included

    Returns:
        complex
    """
    s = complex(s)
    if s.real <= 1:
        raise DomainError(f"Euler product needs Re s > 1, got {s}")
    if p_max < 2:
        return 0j
    f.require(int(p_max), 'euler_product_log')

    total = 0j
    for p in primes_up_to(int(p_max)).primes.tolist():
        log_p = math.log(p)
        L = max(1, int(math.ceil(math.log(2.0 / EULER_TERM_CUTOFF) / (s.real * log_p))))
        u = prime_frame(f, p, L).values[1:]
        l = np.arange(1, L + 1)
        total += complex(np.sum(u * np.exp(-l * s * log_p) / l))
    return total


def _check_poles(f, s):
    a = gamma_shift(f)
    for z in (s + a, 1 - s + a):
        if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
            raise DomainError(f"Gamma factor has a pole at s = {s}")


def _quadrature_nodes(width, h=QUADRATURE_STEP):
    """Symmetric nodes y_k = k h covering the support of the Gaussian-damped integrand"""
    lead = math.pi * width**2 / 4.0
    y_max = lead + math.sqrt(lead**2 + 50.0 * width**2)
    k = int(math.ceil(y_max / h))
    return h * np.arange(-k, k + 1, dtype=float), h


def _cutoff_kernel(f, u, c, width, y, h):
    """Quadrature weights of V_u on the line Re w = c"""
    a = gamma_shift(f)
    w = c + 1j * y
    # X^w Gamma(u+a+w) / Gamma(u+a), in logs
    log_ratio = w * log_conductor(f) + log_gamma_array(u + a + w) - log_gamma(u + a)
    # trapezoid weights on Re w = c, G(w)/w folded in
    kernel = np.exp(log_ratio + (w / width) ** 2) / w * (h / (2 * math.pi))
    return w, kernel


def _smoothed_sum(f, u, n_terms, c, width, y, h, compensated):
    """sum_n lambda(n) n^-u V_u(n) and its rounding floor"""
    w, kernel = _cutoff_kernel(f, u, c, width, y, h)
    log_n = np.log(np.arange(1, n_terms + 1, dtype=float))
    lam = f.coeffs[1:n_terms + 1]

    # V_u(n) = sum_k n^-w_k kernel_k, blocked so the n x k matrix stays bounded
    rows = max(1, CHUNK_CELLS // len(w))
    parts = []
    for start in range(0, n_terms, rows):
        chunk = log_n[start:start + rows]
        cutoff = np.exp(-np.outer(chunk, w)) @ kernel
        parts.append(lam[start:start + rows] * np.exp(-u * chunk) * cutoff)
    terms = np.concatenate(parts)

    # 64 eps times the worst-case magnitude of the summands
    weight = np.abs(lam) * np.exp(-(u.real + c) * log_n)
    floor = ROUNDING_FLOOR * float(np.sum(weight)) * float(np.sum(np.abs(kernel)))
    return _sum(terms, compensated), floor


def _tail_estimate(f, u, n_terms, width, y, h):
    """Bound on the dropped n > n_terms part via |V_u(x)| <= x^-c' int |...|"""
    best = math.inf
    for shift in TAIL_SHIFTS:
        if u.real + shift <= 1.05:
            continue
        _, kernel = _cutoff_kernel(f, u, shift, width, y, h)
        scale = float(np.sum(np.abs(kernel)))
        best = min(best, scale * divisor_tail_bound(n_terms, u.real + shift))
    return best


def afe_value(f, s, width=DEFAULT_WIDTH, n_terms=None, compensated=False):
    """
    L(s, f) by the smoothed approximate functional equation

    Args:
        f: Eigenform
        s: Any complex point away from the Gamma-factor poles
        width: Gaussian width of the smoothing G(w) = exp((w/width)^2)
        n_terms: Coefficients used (default 50 sqrt(N) (1 + |t|))
        compensated: Accumulate the n-sums with math.fsum

    Returns:
        LValue: method 'afe', trunc_error = tail bounds plus rounding floor
    """
    s = complex(s)
    if abs(s.imag) > MAX_ABS_T:
        raise DomainError(f"|t| = {abs(s.imag):g} exceeds {MAX_ABS_T:g}")
    if width <= 0:
        raise DomainError(f"smoothing width must be positive, got {width}")
    _check_poles(f, s)
    if n_terms is None:
        n_terms = required_terms(f, s.imag)
    f.require(n_terms, f"the approximate functional equation at t={s.imag:g}")

    c = CONTOUR_SHIFT + abs(s.real - 0.5)
    y, h = _quadrature_nodes(width)
    a = gamma_shift(f)
    r = 1 - s

    # L(s) = sum_n lambda(n) n^-s V_s(n) + eps X(s) sum_n lambda(n) n^-(1-s) V_{1-s}(n)
    direct, floor_direct = _smoothed_sum(f, s, n_terms, c, width, y, h, compensated)
    dual, floor_dual = _smoothed_sum(f, r, n_terms, c, width, y, h, compensated)
    # X(s) = gamma ratio of the completed L-function
    log_x = (r - s) * log_conductor(f) + log_gamma(r + a) - log_gamma(s + a)
    x = np.exp(log_x)

    value = direct + f.root_number * x * dual
    err = (_tail_estimate(f, s, n_terms, width, y, h) + floor_direct
           + abs(x) * (_tail_estimate(f, r, n_terms, width, y, h) + floor_dual))
    logger.debug("%s: L(%s) = %s via afe (%d terms, err %.2e)", f.form_id, s, value, n_terms, err)
    return LValue(s, complex(value), 'afe', float(err))


def central_value(f, t, width=DEFAULT_WIDTH, compensated=False):
    """L(1/2 + it, f) by the approximate functional equation"""
    return afe_value(f, complex(0.5, t), width=width, compensated=compensated)


def l_value(f, s, width=DEFAULT_WIDTH):
    """L(s, f) from the Dirichlet series far right, otherwise from the afe"""
    s = complex(s)
    if s.real > 2.5:
        return dirichlet_partial(f, s)
    return afe_value(f, s, width=width)


def completed_lambda(f, s, width=DEFAULT_WIDTH):
    """Lambda(s, f) = (sqrt(N)/2 pi)^s Gamma(s + (kappa-1)/2) L(s, f)"""
    s = complex(s)
    factor = np.exp(log_gamma_factor(f, s))
    value = afe_value(f, s, width=width).value
    return CompletedValue(s, complex(factor * value))


def fe_residuals(f, ts, width=DEFAULT_WIDTH):
    """
    Functional-equation residuals |Lambda(1/2+it) - eps Lambda(1/2-it)| on a t-grid

    Returns:
        pd.DataFrame: t, |Lambda|, residual, allowed bound and margin per row
    """
    rows = []
    for t in ts:
        plus = completed_lambda(f, complex(0.5, t), width).lambda_value
        minus = completed_lambda(f, complex(0.5, -t), width).lambda_value
        residual = abs(plus - f.root_number * minus)
        bound = 1e-6 * (1.0 + abs(plus))
        rows.append({'form_id': f.form_id, 't': float(t), 'abs_lambda': abs(plus),
                     'residual': residual, 'bound': bound, 'margin': bound - residual})
    return pd.DataFrame(rows)

"""
Bessel function of the first kind J_nu(x) for real order nu > -2 and x >= 0.

Three branches:
    x <= series_limit(nu):        ascending power series, sum of |terms| of order one.
    series_limit(nu) < x < x_switch(nu): Miller downward recurrence, normalised by
                                  (x/2)^mu = sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(x).
    x >= x_switch(nu):            Hankel asymptotic expansion, truncated at its smallest term.
Orders in (-2, -1] are reached through J_{nu-1} = (2 nu / x) J_nu - J_{nu+1}.
"""
import math

import numpy as np

from specfun.gamma import rgamma, gamma_fn
from utils.errors import DomainError


SERIES_BASE = 2.0
X_SWITCH_BASE = 30.0
MIN_ORDER = -2.0
SERIES_MAX_TERMS = 200
HANKEL_MAX_TERMS = 120
# recurrence values are pulled back below this magnitude
MILLER_RESCALE = 1e250


def series_limit(nu: float) -> float:
    """Largest argument summed by the power series, where I_nu(x) stays of order one."""
    return max(SERIES_BASE, math.sqrt(2.0 * (nu + 1.0)))


def x_switch(nu: float) -> float:
    """Branch point between the recurrence and the asymptotic expansion."""
    return max(X_SWITCH_BASE, nu * nu)


def _series(nu, x):
    """
    Ascending series sum_k (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1)), nu > -1.
    """
    half = 0.5 * x
    q = -half * half
    with np.errstate(divide="ignore"):
        lead = np.where(half > 0, np.power(np.where(half > 0, half, 1.0), nu), 0.0 if nu > 0 else 1.0)
    term = lead * rgamma(nu + 1.0)
    total = term.copy()
    for k in range(1, SERIES_MAX_TERMS):
        term = term * q / (k * (k + nu))
        total = total + term
        if np.all(np.abs(term) <= 1e-18 + 1e-17 * np.abs(total)):
            break
    return total


def _hankel(nu, x):
    """
    J_nu(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - (nu/2 + 1/4) pi.

    Terms a_k(nu)/x^k with a_k = a_{k-1} (4nu^2 - (2k-1)^2) / (8k); summation of
    each point stops as soon as its terms stop decreasing in magnitude.
    """
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, HANKEL_MAX_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        mag = np.abs(term)
        active &= mag < prev
        if not np.any(active):
            break
        if k % 2 == 0:
            p = p + np.where(active, (-1) ** (k // 2) * term, 0.0)
        else:
            q = q + np.where(active, (-1) ** ((k - 1) // 2) * term, 0.0)
        active &= mag > 1e-17
        prev = mag
    chi = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _miller_start(nu: float, x_max: float) -> int:
    # J_m(x) is below 1e-17 of its oscillatory size this far past the turning point
    return int(max(nu, x_max) + 20.0 + 15.0 * np.cbrt(x_max)) + 1


def _miller(nu, x):
    """
    J_nu on x > 0 from the minimal solution of the three-term recurrence,
    run downward in orders mu + k with mu = nu - floor(nu).
    """
    n = max(int(math.floor(nu)), 0)
    mu = nu - n
    top = _miller_start(nu, float(np.max(x)))
    ks = np.arange(1, top // 2 + 2, dtype=float)
    # Neumann coefficients c_0 = Gamma(mu+1), c_k = (mu+2k) Gamma(mu+k)/k!
    ratio = gamma_fn(mu + 1.0) * np.cumprod(np.concatenate([[1.0], (mu + ks[1:] - 1.0) / ks[1:]]))
    coef = np.concatenate([[gamma_fn(mu + 1.0)], (mu + 2.0 * ks) * ratio])

    f_next = np.zeros_like(x)
    f = np.ones_like(x)
    total = coef[top // 2] * f if top % 2 == 0 else np.zeros_like(x)
    target = f.copy() if top == n else np.zeros_like(x)
    for k in range(top, 0, -1):
        f_next, f = f, (2.0 * (mu + k) / x) * f - f_next
        big = np.abs(f) > MILLER_RESCALE
        if np.any(big):
            factor = np.where(big, 1.0 / MILLER_RESCALE, 1.0)
            f, f_next, total, target = f * factor, f_next * factor, total * factor, target * factor
        if k - 1 == n:
            target = f.copy()
        if (k - 1) % 2 == 0:
            total = total + coef[(k - 1) // 2] * f
    return target * np.power(0.5 * x, mu) / total


def _bessel_regular(nu, x):
    # nu > -1
    out = np.empty_like(x)
    series = x <= series_limit(nu)
    hankel = x >= x_switch(nu)
    middle = ~(series | hankel)
    if np.any(series):
        out[series] = _series(nu, x[series])
    if np.any(middle):
        out[middle] = _miller(nu, x[middle])
    if np.any(hankel):
        out[hankel] = _hankel(nu, x[hankel])
    return out


def bessel_j(nu: float, x):
    """
    Bessel function of the first kind.

    Parameters:
        nu: real order, nu > -2.
        x: nonnegative real scalar or array.

    Returns:
        J_nu(x), same shape as `x`. For non-integer nu < 0 the value at x = 0 is
        +-inf, the limit of (x/2)^nu / Gamma(nu+1).
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0) or np.any(np.isnan(x_arr)):
        raise DomainError(f"bessel_j requires x >= 0, got {x}")
    if not nu > MIN_ORDER:
        raise DomainError(f"bessel_j supports orders nu > {MIN_ORDER}, got {nu}")
    xs = np.atleast_1d(x_arr).ravel()

    if nu > -1.0:
        out = _bessel_regular(nu, xs)
    elif nu == -1.0:
        out = -_bessel_regular(1.0, xs)
    else:
        # nu in (-2, -1): step down once from two regular orders
        upper = nu + 1.0
        out = np.empty_like(xs)
        zero = xs == 0
        pos = ~zero
        out[pos] = (2.0 * upper / xs[pos]) * _bessel_regular(upper, xs[pos]) - _bessel_regular(upper + 1.0, xs[pos])
        # leading behaviour (x/2)^nu / Gamma(nu+1), Gamma(nu+1) < 0 on (-1, 0)
        out[zero] = -np.inf
    if nu < 0 and nu != math.floor(nu) and nu > -1.0:
        out = np.where(xs == 0, np.inf, out)
    out = out.reshape(np.shape(x_arr))
    return float(out) if np.ndim(x) == 0 else out

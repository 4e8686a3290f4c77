"""
Generalized Laguerre polynomials L_n^[alpha], their monic versions
p_n = (-1)^n n! L_n, the weight w(x) = x^alpha e^{-x} and the orthonormal
Laguerre functions sqrt(w) q_m.

Evaluation always uses the three-term recurrence
    (k+1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1},
the explicit alternating sum is only kept as a small-degree reference.
"""
from typing import NamedTuple, Union

import mpmath
import numpy as np

from specfun.gamma import log_gamma, gamma_fn
from utils.errors import DomainError


# rescale the recurrence once a value exceeds this magnitude
RESCALE_AT = 1e100
# log of the largest finite double, with a little headroom
LOG_MAX = 700.0


class LaguerreTriple(NamedTuple):
    """L_{n-2}, L_{n-1}, L_n sharing the factor exp(log_scale)."""
    l_nm2: np.ndarray
    l_nm1: np.ndarray
    l_n: np.ndarray
    log_scale: np.ndarray


class SignedLog(NamedTuple):
    """value = sign * exp(log_abs)"""
    sign: np.ndarray
    log_abs: np.ndarray

    def value(self):
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.log_abs)


def check_order(alpha: float, non_hitting: bool = False) -> float:
    """Validate an order alpha > -1 (and alpha >= 1 when non-hitting dynamics are required)."""
    alpha = float(alpha)
    if not alpha > -1.0:
        raise DomainError(f"order alpha must satisfy alpha > -1, got {alpha}")
    if non_hitting and alpha < 1.0:
        raise DomainError(f"non-hitting dynamics require alpha >= 1, got {alpha}")
    return alpha


def check_degree(n: int) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"polynomial degree must be a nonnegative integer, got {n}")
    return int(n)


def _out(x, arr):
    return float(arr) if np.ndim(x) == 0 else arr


def log_weight(alpha: float, x):
    """alpha log x - x; at x = 0 gives 0 for alpha = 0 and -inf for alpha > 0."""
    x_arr = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x_arr > 0, alpha * np.log(np.where(x_arr > 0, x_arr, 1.0)) - x_arr,
                       0.0 if alpha == 0 else (-np.inf if alpha > 0 else np.inf))
    return _out(x, out)


def weight(alpha: float, x):
    """w(x) = x^alpha e^{-x} for x > 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise DomainError(f"weight requires x > 0, got {x}")
    return _out(x, np.exp(log_weight(check_order(alpha), x_arr)))


def laguerre(n: int, alpha: float, x):
    """L_n^[alpha](x) by the ascending three-term recurrence."""
    n = check_degree(n)
    alpha = check_order(alpha)
    x_arr = np.asarray(x, dtype=float)
    prev = np.zeros_like(x_arr)
    cur = np.ones_like(x_arr)
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 + alpha - x_arr) * cur - (k + alpha) * prev) / (k + 1)
    return _out(x, cur)


def laguerre_sum(n: int, alpha: float, x, dps: int = 40):
    """
    Explicit sum  sum_m (-1)^m binom(n+alpha, n-m) x^m / m!, summed in mpmath at
    `dps` digits so the alternating terms do not cancel.

    Slow; kept as a reference for small degrees.
    """
    n = check_degree(n)
    alpha = check_order(alpha)
    x_arr = np.asarray(x, dtype=float)
    with mpmath.workdps(dps):
        a = mpmath.mpf(alpha)
        coeffs = [(-1) ** m * mpmath.binomial(n + a, n - m) / mpmath.factorial(m) for m in range(n + 1)]
        values = [float(mpmath.polyval(coeffs[::-1], mpmath.mpf(float(v)))) for v in x_arr.ravel()]
    return _out(x, np.asarray(values).reshape(x_arr.shape))


def laguerre_scaled(n: int, alpha: float, x) -> LaguerreTriple:
    """
    L_{n-2}, L_{n-1}, L_n at every point with a common per-point log scale, so
    that no intermediate value overflows. Degrees below zero are 0.
    """
    n = check_degree(n)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    l2 = np.zeros_like(x_arr)
    l1 = np.zeros_like(x_arr)
    l0 = np.ones_like(x_arr)
    scale = np.zeros_like(x_arr)
    for k in range(n):
        l2, l1, l0 = l1, l0, ((2 * k + 1 + alpha - x_arr) * l0 - (k + alpha) * l1) / (k + 1)
        big = np.maximum(np.abs(l0), np.abs(l1))
        over = big > RESCALE_AT
        if np.any(over):
            factor = np.where(over, big, 1.0)
            l2, l1, l0 = l2 / factor, l1 / factor, l0 / factor
            scale = scale + np.log(factor)
    return LaguerreTriple(l2, l1, l0, scale)


def laguerre_monic(n: int, alpha: float, x) -> Union[np.ndarray, float, SignedLog]:
    """
    Monic Laguerre polynomial p_n(x) = (-1)^n Gamma(n+1) L_n^[alpha](x).

    Returns:
        the value, or a `SignedLog` when it does not fit in double precision.
    """
    n = check_degree(n)
    alpha = check_order(alpha)
    triple = laguerre_scaled(n, alpha, x)
    sign = (-1.0) ** n * np.sign(triple.l_n)
    with np.errstate(divide="ignore"):
        log_abs = log_gamma(n + 1.0) + np.log(np.abs(triple.l_n)) + triple.log_scale
    if np.any(log_abs > LOG_MAX):
        return SignedLog(sign.reshape(np.shape(x)), log_abs.reshape(np.shape(x)))
    return _out(x, (sign * np.exp(log_abs)).reshape(np.shape(x)))


def monic_norm(n: int, alpha: float) -> float:
    """integral of p_n^2 w over (0, inf) = Gamma(n+1) Gamma(n+alpha+1)."""
    return gamma_fn(n + 1.0) * gamma_fn(n + alpha + 1.0)


def laguerre_derivative_check(n: int, alpha: float, x, h: float = 1e-5):
    """
    Finite-difference check of d/dx L_n^[alpha] = -L_{n-1}^[alpha+1].

    Returns:
        (lhs, rhs): central difference of L_n at x and -L_{n-1}^[alpha+1](x).
    """
    n = check_degree(n)
    if n < 1:
        raise DomainError("laguerre_derivative_check requires n >= 1")
    x_arr = np.asarray(x, dtype=float)
    lhs = (laguerre(n, alpha, x_arr + h) - laguerre(n, alpha, x_arr - h)) / (2.0 * h)
    rhs = -laguerre(n - 1, alpha + 1.0, x_arr)
    return _out(x, lhs), _out(x, rhs)


def orthonormal_functions(N: int, alpha: float, x) -> np.ndarray:
    """
    Orthonormal Laguerre functions psi_m(x) = sqrt(w(x)) q_m(x), m = 0..N-1.

    q_m is the orthonormal polynomial with positive leading coefficient; the
    normalized recurrence
        a_{m+1} q_{m+1} = (x - b_m) q_m - a_m q_{m-1},
        a_m = sqrt(m (m + alpha)), b_m = 2m + alpha + 1,
    runs with a per-point log scale so that large x neither overflows q nor
    underflows sqrt(w) prematurely.

    Returns:
        array of shape (len(x), N).
    """
    alpha = check_order(alpha)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    half_logw = 0.5 * np.asarray(log_weight(alpha, x_arr))
    out = np.empty((x_arr.size, N))
    prev = np.zeros_like(x_arr)
    cur = np.full_like(x_arr, np.exp(-0.5 * log_gamma(alpha + 1.0)))
    scale = np.zeros_like(x_arr)

    def emit(m):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            mag = np.log(np.abs(cur)) + scale + half_logw
            out[:, m] = np.where(cur == 0, 0.0, np.sign(cur) * np.exp(mag))

    for m in range(N):
        emit(m)
        if m == N - 1:
            break
        a_next = np.sqrt((m + 1) * (m + 1 + alpha))
        a_cur = np.sqrt(m * (m + alpha)) if m > 0 else 0.0
        prev, cur = cur, ((x_arr - (2 * m + alpha + 1)) * cur - a_cur * prev) / a_next
        big = np.maximum(np.abs(cur), np.abs(prev))
        over = big > RESCALE_AT
        if np.any(over):
            factor = np.where(over, big, 1.0)
            prev, cur = prev / factor, cur / factor
            scale = scale + np.log(factor)
    out[~np.isfinite(out)] = 0.0
    return out

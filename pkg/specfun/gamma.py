"""
Gamma function family on the real line.

Lanczos approximation (g = 7, nine coefficients) for arguments >= 1/2 and the
reflection formula below. Accurate to a few ulps in double precision.
"""
import math

import numpy as np

from utils.errors import DomainError


LANCZOS_G = 7.0
LANCZOS_COEFFS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)

# largest argument with a finite double precision Gamma
GAMMA_MAX_ARG = 171.6


def _scalar_or_array(z, out):
    return float(out) if np.ndim(z) == 0 else out


def _lanczos_sum(z):
    # z is the shifted argument (original minus one)
    acc = np.full_like(z, LANCZOS_COEFFS[0])
    for i, c in enumerate(LANCZOS_COEFFS[1:], start=1):
        acc = acc + c / (z + i)
    return acc


def _is_pole(z):
    return (z <= 0) & (z == np.floor(z))


def _gamma_upper(z):
    # z >= 0.5
    zs = z - 1.0
    t = zs + LANCZOS_G + 0.5
    half = np.power(t, (zs + 0.5) / 2.0)
    return SQRT_2PI * half * (half * np.exp(-t)) * _lanczos_sum(zs)


def _log_gamma_upper(z):
    zs = z - 1.0
    t = zs + LANCZOS_G + 0.5
    return LOG_SQRT_2PI + (zs + 0.5) * np.log(t) - t + np.log(_lanczos_sum(zs))


def gamma_fn(z):
    """
    Gamma function for positive arguments.

    Parameters:
        z: positive real scalar or array, at most `GAMMA_MAX_ARG`.

    Returns:
        Gamma(z). Beyond `GAMMA_MAX_ARG` the value overflows; use `log_gamma`.
    """
    z_arr = np.asarray(z, dtype=float)
    if np.any(~(z_arr > 0)):
        raise DomainError(f"gamma_fn requires z > 0, got {z}")
    if np.any(z_arr > GAMMA_MAX_ARG):
        raise OverflowError(f"Gamma({np.max(z_arr)}) overflows double precision, use log_gamma")
    z_arr = np.atleast_1d(z_arr)
    out = np.empty_like(z_arr)
    upper = z_arr >= 0.5
    out[upper] = _gamma_upper(z_arr[upper])
    low = ~upper
    if np.any(low):
        zl = z_arr[low]
        out[low] = math.pi / (np.sin(math.pi * zl) * _gamma_upper(1.0 - zl))
    return _scalar_or_array(z, out.reshape(np.shape(z)))


def log_gamma(z):
    """log|Gamma(z)| for every real z that is not a pole."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(_is_pole(z_arr)):
        raise DomainError(f"log_gamma has poles at nonpositive integers, got {z}")
    out = np.empty_like(z_arr)
    upper = z_arr >= 0.5
    out[upper] = _log_gamma_upper(z_arr[upper])
    low = ~upper
    if np.any(low):
        zl = z_arr[low]
        out[low] = math.log(math.pi) - np.log(np.abs(np.sin(math.pi * zl))) - _log_gamma_upper(1.0 - zl)
    return _scalar_or_array(z, out.reshape(np.shape(z)))


def gamma_sign(z):
    """Sign of Gamma(z); zero at the poles."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.ones_like(z_arr)
    neg = z_arr < 0
    # Gamma alternates sign between consecutive negative integers
    out[neg] = np.where(np.floor(z_arr[neg]) % 2 == 0, 1.0, -1.0)
    out[_is_pole(z_arr)] = 0.0
    return _scalar_or_array(z, out.reshape(np.shape(z)))


def rgamma(z):
    """Reciprocal Gamma, entire: zero at nonpositive integers, no overflow for large z."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.zeros_like(z_arr)
    regular = ~_is_pole(z_arr)
    zr = z_arr[regular]
    big = zr > GAMMA_MAX_ARG - 1
    val = np.empty_like(zr)
    val[big] = np.exp(-_log_gamma_upper(zr[big]))
    mid = (~big) & (zr >= 0.5)
    val[mid] = 1.0 / _gamma_upper(zr[mid])
    low = zr < 0.5
    if np.any(low):
        zl = zr[low]
        val[low] = np.sin(math.pi * zl) * _gamma_upper(1.0 - zl) / math.pi
    out[regular] = val
    return _scalar_or_array(z, out.reshape(np.shape(z)))


def log_binomial(a, k):
    """log binom(a, k) = log Gamma(a+1) - log Gamma(k+1) - log Gamma(a-k+1), all arguments off the poles."""
    return log_gamma(a + 1.0) - log_gamma(k + 1.0) - log_gamma(a - k + 1.0)

"""
Finite-N Laguerre kernels.

On the matrix scale (weight x^a e^{-x})

    k(x, y) = sqrt(w(x) w(y)) sum_{m<N} p_m(x) p_m(y) / ||p_m||^2
            = sqrt(w(x) w(y)) Gamma(N+1)/Gamma(N+a) (L_{N-1}(x) L_N(y) - L_N(x) L_{N-1}(y)) / (x - y),

with the confluent diagonal

    k(x, x) = w(x) Gamma(N+1)/Gamma(N+a) (L^{a+1}_{N-1}(x) L^a_{N-1}(x) - L^a_N(x) L^{a+1}_{N-2}(x)).

The hard-edge kernel is K^N(x, y) = k(x/4N, y/4N) / 4N. Products are formed in
log space from scaled Laguerre triples, so N in the hundreds is fine.
"""
from dataclasses import dataclass, field

import numpy as np

from kernels.base import Kernel, check_positive, near_diagonal_blend, DIAG_THRESHOLD
from specfun.gamma import log_gamma
from specfun.laguerre import check_order, laguerre_scaled, log_weight, orthonormal_functions
from utils.errors import DegenerateConditioningError, DomainError, KernelOverflowError


FORMS = ("auto", "cd", "sum")
# smallest admissible K(x, x) at a conditioning point
EPS_PALM = 1e-12


def _log_prefactor(N, alpha):
    return log_gamma(N + 1.0) - log_gamma(N + alpha)


def _signed_exp(sign, log_abs):
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(sign == 0, 0.0, sign * np.exp(log_abs))
    if np.any(~np.isfinite(out)):
        raise KernelOverflowError(f"kernel value out of double range (log magnitude {np.nanmax(log_abs):.1f})")
    return out


def _log_abs(v):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(v))


def christoffel_darboux(N: int, alpha: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix-scale CD ratio at distinct u, v (flat arrays)."""
    values, inverse = np.unique(np.concatenate([u, v]), return_inverse=True)
    tri = laguerre_scaled(N, alpha, values)
    half_logw = 0.5 * np.asarray(log_weight(alpha, values))
    iu, iv = inverse[:u.size], inverse[u.size:]
    num = tri.l_nm1[iu] * tri.l_n[iv] - tri.l_n[iu] * tri.l_nm1[iv]
    diff = u - v
    log_abs = (_log_abs(num) - _log_abs(diff) + half_logw[iu] + half_logw[iv]
               + tri.log_scale[iu] + tri.log_scale[iv] + _log_prefactor(N, alpha))
    return _signed_exp(np.sign(num) * np.sign(diff), log_abs)


def _confluent_log(N, alpha, u):
    # sign and log|.| of L^{a+1}_{N-1} L^a_{N-1} - L^a_N L^{a+1}_{N-2}
    low = laguerre_scaled(N, alpha, u)
    up = laguerre_scaled(N - 1, alpha + 1.0, u)
    bracket = up.l_n * low.l_nm1 - low.l_n * up.l_nm1
    return np.sign(bracket), _log_abs(bracket) + low.log_scale + up.log_scale


def confluent_diagonal(N: int, alpha: float, u: np.ndarray) -> np.ndarray:
    """Matrix-scale k(u, u) from the confluent form."""
    sign, log_abs = _confluent_log(N, alpha, u)
    return _signed_exp(sign, log_abs + np.asarray(log_weight(alpha, u)) + _log_prefactor(N, alpha))


def _check_size(N):
    if int(N) != N or N < 1:
        raise DomainError(f"ensemble size N must be a positive integer, got {N}")
    return int(N)


@dataclass(frozen=True)
class LaguerreKernelN(Kernel):
    """
    Christoffel-Darboux kernel of the N-point Laguerre ensemble.

    Args:
        alpha: order, alpha > -1.
        N: ensemble size.
        rescaled: evaluate K^N on the hard-edge scale (True) or k on the matrix scale.
        form: "auto" (CD ratio with confluent diagonal), "cd" (same, no band) or "sum".
    """
    alpha: float
    N: int
    rescaled: bool = True
    form: str = "auto"
    delta: float = DIAG_THRESHOLD
    scale: float = field(init=False, repr=False)

    def __post_init__(self):
        check_order(self.alpha)
        object.__setattr__(self, "N", _check_size(self.N))
        if self.form not in FORMS:
            raise ValueError(f"Unknown kernel form: {self.form}")
        object.__setattr__(self, "scale", 4.0 * self.N if self.rescaled else 1.0)

    def _to_matrix(self, x):
        return x / self.scale

    def _hardedge_ratio(self, x, y):
        four_n = 4.0 * self.N
        return christoffel_darboux(self.N, self.alpha, x / four_n, y / four_n) / four_n

    def _hardedge_diag(self, x):
        four_n = 4.0 * self.N
        return confluent_diagonal(self.N, self.alpha, x / four_n) / four_n

    def _evaluate(self, x, y):
        # x, y flat, caller's scale
        if self.form == "sum":
            values, inverse = np.unique(np.concatenate([x, y]), return_inverse=True)
            phi = self.functions(values)
            return np.sum(phi[inverse[:x.size]] * phi[inverse[x.size:]], axis=1)
        # the diagonal band is always placed on the hard-edge scale
        to_edge = 4.0 * self.N / self.scale
        if self.form == "cd":
            out = np.empty_like(x)
            same = x == y
            out[~same] = self._hardedge_ratio(x[~same] * to_edge, y[~same] * to_edge)
            out[same] = self._hardedge_diag(x[same] * to_edge)
        else:
            out = near_diagonal_blend(self._hardedge_ratio, self._hardedge_diag,
                                      x * to_edge, y * to_edge, self.delta)
        return out * to_edge

    def __call__(self, x, y):
        xb, yb = np.broadcast_arrays(check_positive("x", x), check_positive("y", y))
        out = self._evaluate(xb.ravel().astype(float), yb.ravel().astype(float))
        return self._shape_out(xb, out.reshape(xb.shape))

    def diagonal(self, x):
        """rho^{N,1}(x) = K(x, x)."""
        xa = check_positive("x", x)
        flat = np.atleast_1d(xa).ravel()
        if self.form == "sum":
            out = np.sum(self.functions(flat) ** 2, axis=1)
        else:
            to_edge = 4.0 * self.N / self.scale
            out = self._hardedge_diag(flat * to_edge) * to_edge
        return self._shape_out(xa, out.reshape(np.shape(xa)))

    def functions(self, x) -> np.ndarray:
        """
        Orthonormal functions phi_m on this kernel's scale, K(x, y) = sum_m phi_m(x) phi_m(y).
        Shape (len(x), N).
        """
        xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        return orthonormal_functions(self.N, self.alpha, self._to_matrix(xa)) / np.sqrt(self.scale)

    @property
    def support(self) -> float:
        """Right end of the bulk, 16N^2 on the hard-edge scale (4N on the matrix scale)."""
        return 4.0 * self.N * 4.0 * self.N / self.scale


def laguerre_kernel_eval(params: LaguerreKernelN, x, y, form: str = None):
    """Evaluate `params` at (x, y), optionally forcing a form ("auto", "cd", "sum")."""
    if form is not None and form != params.form:
        params = LaguerreKernelN(params.alpha, params.N, params.rescaled, form, params.delta)
    return params(x, y)


@dataclass(frozen=True)
class PalmKernelN(Kernel):
    """Reduced Palm kernel K(y, z) - K(y, x) K(x, z) / K(x, x) for the conditioning point x."""
    base: LaguerreKernelN
    x: float
    eps: float = EPS_PALM
    kxx: float = field(init=False, repr=False)

    def __post_init__(self):
        check_positive("conditioning point", self.x)
        kxx = float(self.base.diagonal(float(self.x)))
        if not kxx > self.eps:
            raise DegenerateConditioningError(
                f"K(x, x) = {kxx:.3e} at conditioning point x = {self.x} is below eps_palm = {self.eps:.1e}")
        object.__setattr__(self, "kxx", kxx)

    def __call__(self, y, z):
        yb, zb = np.broadcast_arrays(check_positive("y", y), check_positive("z", z))
        yf, zf = yb.ravel().astype(float), zb.ravel().astype(float)
        xs = np.full_like(yf, float(self.x))
        out = self.base(yf, zf) - self.base(yf, xs) * self.base(xs, zf) / self.kxx
        out[(yf == self.x) | (zf == self.x)] = 0.0
        return self._shape_out(yb, out.reshape(yb.shape))

    def diagonal(self, y):
        ya = check_positive("y", y)
        yf = np.atleast_1d(ya).ravel().astype(float)
        k_yx = self.base(yf, np.full_like(yf, float(self.x)))
        out = self.base.diagonal(yf) - k_yx * k_yx / self.kxx
        out[yf == self.x] = 0.0
        return self._shape_out(ya, out.reshape(np.shape(ya)))


def palm_kernel_eval(palm: PalmKernelN, y, z):
    return palm(y, z)


def m_function(n: int, alpha: float, x):
    """
    M(x) = x^{a+1/2} e^{-x} (L^{a+1}_{n-1}(x) L^a_{n-1}(x) - L^a_n(x) L^{a+1}_{n-2}(x)), x > 0.
    """
    check_order(alpha)
    n = _check_size(n)
    xa = check_positive("x", x)
    flat = np.atleast_1d(xa).ravel()
    sign, log_abs = _confluent_log(n, alpha, flat)
    out = _signed_exp(sign, log_abs + (alpha + 0.5) * np.log(flat) - flat).reshape(np.shape(xa))
    return float(out) if np.ndim(x) == 0 else out


def diagonal_via_m(N: int, alpha: float, y):
    """rho^{N,1}(y) = Gamma(N+1)/Gamma(N+a) M(y/4N) / sqrt(4N y)."""
    ya = check_positive("y", y)
    four_n = 4.0 * _check_size(N)
    out = np.exp(_log_prefactor(N, alpha)) * np.asarray(m_function(N, alpha, ya / four_n)) / np.sqrt(four_n * ya)
    return float(out) if np.ndim(y) == 0 else out

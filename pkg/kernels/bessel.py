"""
Bessel kernel of the hard edge

    K(x, y) = (sqrt(x) J_{a+1}(sqrt(x)) J_a(sqrt(y)) - J_a(sqrt(x)) sqrt(y) J_{a+1}(sqrt(y))) / (2 (x - y)),
    K(x, x) = (J_a(sqrt(x))^2 - J_{a+1}(sqrt(x)) J_{a-1}(sqrt(x))) / 4.
"""
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from kernels.base import Kernel, check_positive, near_diagonal_blend, DIAG_THRESHOLD
from specfun.bessel import bessel_j
from specfun.laguerre import check_order


@dataclass(frozen=True)
class BesselKernel(Kernel):
    alpha: float
    delta: float = DIAG_THRESHOLD

    def __post_init__(self):
        check_order(self.alpha)

    def _ratio(self, x, y):
        values, inverse = np.unique(np.concatenate([x, y]), return_inverse=True)
        root = np.sqrt(values)
        j_a = bessel_j(self.alpha, root)
        j_a1 = bessel_j(self.alpha + 1.0, root)
        ix, iy = inverse[:x.size], inverse[x.size:]
        num = root[ix] * j_a1[ix] * j_a[iy] - j_a[ix] * root[iy] * j_a1[iy]
        return num / (2.0 * (x - y))

    def _confluent(self, x):
        root = np.sqrt(x)
        j_a = bessel_j(self.alpha, root)
        return 0.25 * (j_a * j_a - bessel_j(self.alpha + 1.0, root) * bessel_j(self.alpha - 1.0, root))

    def __call__(self, x, y):
        xb, yb = np.broadcast_arrays(check_positive("x", x), check_positive("y", y))
        out = near_diagonal_blend(self._ratio, self._confluent, xb.ravel(), yb.ravel(), self.delta)
        return self._shape_out(xb, out.reshape(xb.shape))

    def diagonal(self, x):
        xa = check_positive("x", x)
        out = self._confluent(np.atleast_1d(xa).ravel()).reshape(np.shape(xa))
        return self._shape_out(xa, out)


def bessel_kernel_eval(alpha: float, x, y):
    """K_alpha(x, y) on the hard-edge scale, x, y > 0."""
    return BesselKernel(alpha)(x, y)


def bessel_kernel_integral(alpha: float, x: float, y: float) -> float:
    """
    Independent representation K(x, y) = 1/4 int_0^1 J_a(sqrt(t x)) J_a(sqrt(t y)) dt,
    evaluated with adaptive quadrature.
    """
    check_order(alpha)
    x, y = float(check_positive("x", x)), float(check_positive("y", y))

    def integrand(t):
        return bessel_j(alpha, np.sqrt(t * x)) * bessel_j(alpha, np.sqrt(t * y))

    value, _ = integrate.quad(integrand, 0.0, 1.0, limit=200, epsabs=1e-13, epsrel=1e-12)
    return 0.25 * value

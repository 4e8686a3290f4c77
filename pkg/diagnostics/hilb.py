"""
Hilb-type asymptotics of the weighted Laguerre polynomials near the hard edge,

    w(x)^{1/2} L_n(x) = A_n J_a(sqrt(4 Nb x)) + x^{5/4} O(n^{a/2 - 3/4}),

with Nb = n + (a + 1)/2 and A_n = Gamma(n+1+a) / (Nb^{a/2} Gamma(n+1)),
valid for c/n <= x <= omega.
"""
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from kernels.laguerre import LaguerreKernelN, diagonal_via_m
from specfun import bessel_j, laguerre, log_gamma, check_order, check_degree
from utils.errors import DomainError
from utils.report import DiagnosticReport


SLOPE_TOL = 0.05


@dataclass(frozen=True)
class HilbSpec:
    alpha: float
    n_list: Tuple[int, ...] = (50, 100, 200)
    x_range: Tuple[float, float] = (0.05, 2.0)
    points: int = 400
    c1: float = 1.0

    def __post_init__(self):
        check_order(self.alpha)
        object.__setattr__(self, "n_list", tuple(check_degree(n) for n in self.n_list))
        if len(self.n_list) == 0:
            raise DomainError("HilbSpec needs at least one degree")
        lo, hi = self.x_range
        if not 0 < lo < hi:
            raise DomainError(f"x_range must satisfy 0 < lo < hi, got {self.x_range}")
        if lo < self.c1 / min(self.n_list):
            raise DomainError(f"x_range starts at {lo} below c1/n = {self.c1 / min(self.n_list)}")

    def N_bar(self, n: int) -> float:
        return n + 0.5 * (self.alpha + 1.0)

    @property
    def grid(self) -> np.ndarray:
        return np.geomspace(self.x_range[0], self.x_range[1], self.points)


def log_amplitude(n: int, alpha: float) -> float:
    """log A_n, kept in log space for large n."""
    nb = n + 0.5 * (alpha + 1.0)
    return float(log_gamma(n + 1.0 + alpha) - 0.5 * alpha * np.log(nb) - log_gamma(n + 1.0))


def residual(n: int, alpha: float, x) -> np.ndarray:
    """R(n, x) = w^{1/2} L_n(x) - A_n J_a(sqrt(4 Nb x))."""
    x = np.asarray(x, dtype=float)
    nb = n + 0.5 * (alpha + 1.0)
    weighted = np.exp(0.5 * alpha * np.log(x) - 0.5 * x) * laguerre(n, alpha, x)
    return weighted - np.exp(log_amplitude(n, alpha)) * bessel_j(alpha, np.sqrt(4.0 * nb * x))


def hilb_residual(spec: HilbSpec, slope_tol: float = SLOPE_TOL) -> DiagnosticReport:
    """
    Sup over the x grid of |R| n^{3/4 - a/2} / x^{5/4} for every n; the check
    passes when the least-squares slope of its logarithm against log n stays
    below `slope_tol`.
    """
    x = spec.grid
    sups, rows = [], []
    for n in spec.n_list:
        normalized = np.abs(residual(n, spec.alpha, x)) * n ** (0.75 - 0.5 * spec.alpha) / x ** 1.25
        sups.append(float(np.max(normalized)))
        rows.append(pd.DataFrame({"n": n, "x": x, "normalized_residual": normalized}))

    report = DiagnosticReport("hilb", {"alpha": spec.alpha, "n_list": list(spec.n_list),
                                       "x_range": list(spec.x_range), "points": spec.points})
    for n, value in zip(spec.n_list, sups):
        report.add(f"sup_normalized_n{n}", value)
    report.add(f"amplitude_n{spec.n_list[-1]}", np.exp(log_amplitude(spec.n_list[-1], spec.alpha)))
    if len(spec.n_list) >= 2:
        slope = float(np.polyfit(np.log(spec.n_list), np.log(sups), 1)[0])
        report.add("log_slope", slope, tolerance=slope_tol)
    report.tables["residual"] = pd.concat(rows, ignore_index=True)
    return report


def implied_constant(N: int, alpha: float) -> float:
    """c in rho(y) = (c / sqrt(y)) N^{-(a - 1/2)} M(y / 4N); tends to 1/2."""
    return float(0.5 * np.exp(log_gamma(N + 1.0) - log_gamma(N + alpha) + (alpha - 1.0) * np.log(N)))


def m_identity_check(alpha: float, N_list: Iterable[int] = (50, 100, 200), y: Optional[np.ndarray] = None,
                     tolerance: float = 1e-7) -> DiagnosticReport:
    """
    The one-point density from the orthonormal functions against its closed
    form through M, the constant that form implies for the 1/sqrt(y) envelope
    and the observed sup of sqrt(y) rho on the grid.
    """
    check_order(alpha)
    N_list = [int(n) for n in N_list]
    y = np.geomspace(1e-2, 50.0, 200) if y is None else np.asarray(y, dtype=float)
    report = DiagnosticReport("m_identity", {"alpha": alpha, "N_list": N_list, "points": int(y.size)})
    constants = []
    for N in N_list:
        phi = LaguerreKernelN(alpha, N).functions(y)
        rho = np.sum(phi * phi, axis=1)
        closed = diagonal_via_m(N, alpha, y)
        report.add(f"relative_error_N{N}", float(np.max(np.abs(rho - closed) / np.abs(closed))), tolerance=tolerance)
        c = implied_constant(N, alpha)
        report.add(f"sqrt_y_rho_sup_N{N}", float(np.max(np.sqrt(y) * rho)))
        report.add(f"implied_c_N{N}", c)
        constants.append(c)
    report.add("implied_c_spread", float(np.ptp(constants) / np.max(constants)))
    return report

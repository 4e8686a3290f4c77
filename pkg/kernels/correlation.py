"""
Correlation functions as kernel determinants, plus kernel-level reports:
hard-edge convergence, Hadamard bounds, the sqrt(x) rho^1 envelope, the
operator bound 0 <= K <= Id on a Nystrom grid and the trace identity.
"""
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import integrate
from scipy.linalg import lu_factor
from scipy.special import roots_legendre
from tqdm import tqdm

from kernels.bessel import BesselKernel
from kernels.laguerre import LaguerreKernelN
from utils.errors import DomainError, PSDViolationError
from utils.report import DiagnosticReport


# relative size of a negative determinant still attributed to roundoff
DET_CLAMP = 1e-10


def correlation_fn(kernel, points: Sequence[float]) -> float:
    """
    rho^n(x_1, ..., x_n) = det[K(x_i, x_j)] by pivoted LU.

    Raises:
        DomainError: no points or duplicated points.
        PSDViolationError: determinant below -DET_CLAMP * prod K(x_i, x_i).
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float)).ravel()
    if pts.size == 0:
        raise DomainError("correlation_fn needs at least one point")
    if np.unique(pts).size != pts.size:
        raise DomainError(f"correlation_fn got duplicated points: {pts.tolist()}")
    entries = kernel.matrix(pts).entries
    if pts.size == 1:
        det = float(entries[0, 0])
    else:
        lu, piv = lu_factor(entries)
        swaps = np.count_nonzero(piv != np.arange(pts.size))
        det = float(np.prod(np.diag(lu)) * (-1.0) ** swaps)
    if det < 0:
        scale = float(np.prod(np.abs(np.diag(entries))))
        if det >= -DET_CLAMP * scale:
            return 0.0
        raise PSDViolationError(f"correlation determinant {det:.3e} below roundoff clamp {-DET_CLAMP * scale:.3e}")
    return det


def hadamard_report(kernel, points: Sequence[float]) -> DiagnosticReport:
    """
    rho^n against the Hadamard row bound prod ||K_i||, the cruder (c1 sqrt(n))^n
    with c1 = max |K(x_i, x_j)|, and the product bound prod rho^1(x_i).
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float)).ravel()
    km = kernel.matrix(pts)
    n = pts.size
    rho_n = correlation_fn(kernel, pts)
    rows = float(np.prod(km.row_norms()))
    c1 = float(np.max(np.abs(km.entries)))
    product = float(np.prod(np.diag(km.entries)))
    slack = 1.0 + 1e-10

    report = DiagnosticReport("hadamard", {"points": pts.tolist(), "n": n})
    report.add("rho_n", rho_n)
    report.add("row_norm_product", rows, passed=rho_n <= rows * slack)
    report.add("c1_sqrt_n_power", (c1 * np.sqrt(n)) ** n, passed=rows <= (c1 * np.sqrt(n)) ** n * slack)
    report.add("rho1_product", product, passed=rho_n <= product * slack)
    return report


def convergence_grid(r: float, n: int) -> np.ndarray:
    """n points on (0, r], the origin excluded."""
    return np.linspace(r / n, r, n)


def kernel_convergence_report(alpha: float, N_list: Iterable[int], grid: Optional[np.ndarray] = None,
                              r: float = 10.0, n: int = 50, target: float = 0.05,
                              progress: bool = True) -> DiagnosticReport:
    """
    sup over grid x grid of |K^N - K| for each N in N_list.

    Passes when the sup-norms strictly decrease along N_list and the last one is
    below `target`.
    """
    N_list = [int(N) for N in N_list]
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise DomainError(f"N_list must be increasing, got {N_list}")
    grid = convergence_grid(r, n) if grid is None else np.asarray(grid, dtype=float)
    limit = BesselKernel(alpha)(grid[:, None], grid[None, :])

    sups = []
    with tqdm(N_list, dynamic_ncols=True, colour="#ff924a", disable=not progress) as data:
        for N in data:
            finite = LaguerreKernelN(alpha, N)(grid[:, None], grid[None, :])
            sups.append(float(np.max(np.abs(finite - limit))))
            data.set_description(f"convergence N={N}")
            data.set_postfix(sup=sups[-1])

    report = DiagnosticReport("kernel_convergence", {"alpha": alpha, "N_list": N_list,
                                                     "grid_min": float(grid.min()), "grid_max": float(grid.max()),
                                                     "grid_size": int(grid.size), "target": target})
    for N, sup in zip(N_list, sups):
        report.add(f"sup_N{N}", sup)
    increases = sum(1 for a, b in zip(sups, sups[1:]) if not b < a)
    report.add("non_decreasing_steps", increases, tolerance=0)
    report.add("sup_at_largest_N", sups[-1], tolerance=target)
    report.tables["sup"] = pd.DataFrame({"N": N_list, "sup": sups})
    return report


def envelope_report(alpha: float, N_list: Iterable[int], omega: float = 2.0, n_grid: int = 4000,
                    tolerance: float = 0.1) -> DiagnosticReport:
    """
    Empirical constant of rho^{N,1}(x) <= c / sqrt(x): sup of sqrt(x) rho^{N,1}(x)
    over x in [1, 4N omega] for each N, and its relative spread across N.
    """
    N_list = [int(N) for N in N_list]
    report = DiagnosticReport("edge_envelope", {"alpha": alpha, "N_list": N_list, "omega": omega, "n_grid": n_grid})
    sups, where = [], []
    for N in N_list:
        x = np.geomspace(1.0, 4.0 * N * omega, n_grid)
        values = np.sqrt(x) * LaguerreKernelN(alpha, N).diagonal(x)
        k = int(np.argmax(values))
        sups.append(float(values[k]))
        where.append(float(x[k]))
        report.add(f"sup_sqrt_x_rho_N{N}", sups[-1])
    spread = (max(sups) - min(sups)) / max(sups)
    report.add("relative_spread", spread, tolerance=tolerance)
    report.add("empirical_c", max(sups))
    report.tables["sup"] = pd.DataFrame({"N": N_list, "sup": sups, "argmax": where})
    return report


def nystrom_operator_report(kernel, r: float = 20.0, nodes: int = 200, eps: float = 1e-6) -> DiagnosticReport:
    """
    Eigenvalues of the Nystrom matrix sqrt(w_i) K(x_i, x_j) sqrt(w_j) with
    Gauss-Legendre nodes on [0, r]; the operator bound 0 <= K <= Id predicts
    them in [-eps, 1 + eps].
    """
    t, w = roots_legendre(nodes)
    x = 0.5 * r * (t + 1.0)
    sw = np.sqrt(0.5 * r * w)
    entries = kernel.matrix(x).entries
    eig = np.linalg.eigvalsh(sw[:, None] * entries * sw[None, :])
    report = DiagnosticReport("operator_bound", {"kernel": repr(kernel), "r": r, "nodes": nodes, "eps": eps})
    report.add("min_eigenvalue", eig[0], passed=eig[0] >= -eps)
    report.add("max_eigenvalue", eig[-1], passed=eig[-1] <= 1.0 + eps)
    report.tables["eigenvalues"] = pd.DataFrame({"eigenvalue": eig})
    return report


def trace_report(alpha: float, N: int, omega_trace: float = 4.0, tolerance: float = 1e-6) -> DiagnosticReport:
    """
    int_0^inf rho^{N,1} = N. The matrix-scale diagonal is integrated on
    [0, 4N omega_trace] and the remaining tail is reported separately.
    """
    kernel = LaguerreKernelN(alpha, N, rescaled=False)
    upper = 4.0 * N * omega_trace

    def density(u):
        return kernel.diagonal(u)

    edges = np.linspace(0.0, upper, 4 * N + 1)
    body = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        part, _ = integrate.quad(density, a, b, limit=200, epsabs=1e-13, epsrel=1e-12)
        body += part
    tail, _ = integrate.quad(density, upper, np.inf, limit=200)

    report = DiagnosticReport("trace", {"alpha": alpha, "N": N, "omega_trace": omega_trace})
    report.add("integral", body)
    report.add("tail", tail)
    report.add("trace_error", abs(body + tail - N), tolerance=tolerance)
    return report

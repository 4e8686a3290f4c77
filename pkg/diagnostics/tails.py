"""
Tail integrals of the one- and two-point correlation functions of the N-point
ensemble on the region S = {y > 0 : |x - y| >= s}, with f(y) = 1/|x - y|,
k(y) = K(y, x) and kappa = K(x, x):

    A = int rho f                      B = int k^2 f / kappa
    C = int rho f^2 + intint rho^2(y, z) f(y) f(z)
    D = int k^2 f^2 / kappa + intint |rho_x^2 - rho^2|(y, z) f(y) f(z)

The double integrals factor through the orthonormal functions phi_m of the
kernel: with G = int phi phi^T f and v = int phi k f,

    intint rho^2 f f = A^2 - ||G||_F^2,
    intint |rho_x^2 - rho^2| f f = (2 A kappa B - 2 ||v||^2) / kappa,

the Palm difference rho_x^2 - rho^2 being nonpositive. Integration runs on the
hard-edge scale, split at 4N omega, up to a point beyond which rho is negligible.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from diagnostics.quadrature import adaptive_panels, sqrt_breakpoints, PANEL_TOL, PANEL_ORDER
from ensemble.configuration import matrix_to_hardedge, support_upper
from kernels.laguerre import LaguerreKernelN
from specfun.laguerre import check_order
from utils.errors import DomainError
from utils.report import DiagnosticReport


@dataclass(frozen=True)
class TailIntegralSpec:
    alpha: float
    N: int
    x: float
    s: float
    r: float
    omega: float = 4.0

    def __post_init__(self):
        check_order(self.alpha)
        if not self.s > 0:
            raise DomainError(f"inner cutoff s must be positive, got {self.s}")
        if not 0 < self.x <= self.r:
            raise DomainError(f"base point x must lie in (0, r], got x={self.x}, r={self.r}")
        if not 4.0 * self.N * self.omega > self.r:
            raise DomainError(f"4N omega = {4.0 * self.N * self.omega} must exceed r = {self.r}")

    @property
    def split(self) -> float:
        return 4.0 * self.N * self.omega

    @property
    def upper(self) -> float:
        return float(matrix_to_hardedge(support_upper(self.N, self.alpha), self.N))


def region_breakpoints(spec: TailIntegralSpec) -> list:
    """Intervals of the region, right pieces pre-split uniformly in sqrt(y)."""
    pieces = []
    if spec.x - spec.s > 0:
        pieces.append(np.array([0.0, spec.x - spec.s]))
    start = spec.x + spec.s
    panels = 2 * spec.N + 2
    for a, b in ((start, spec.split), (max(start, spec.split), spec.upper)):
        if b > a:
            pieces.append(sqrt_breakpoints(a, b, panels))
    return pieces


@dataclass
class TailMesh:
    nodes: np.ndarray
    weights: np.ndarray
    phi: np.ndarray
    phi_x: np.ndarray
    kxx: float

    @property
    def rho(self):
        return np.sum(self.phi * self.phi, axis=1)

    @property
    def k(self):
        return self.phi @ self.phi_x


@lru_cache(maxsize=64)
def tail_mesh(spec: TailIntegralSpec, tol: float = PANEL_TOL) -> TailMesh:
    """Adaptive mesh resolving rho f, k^2 f and their f^2 versions on the region."""
    kernel = LaguerreKernelN(spec.alpha, spec.N)
    phi_x = kernel.functions([spec.x])[0]
    kxx = float(phi_x @ phi_x)

    def integrand(y):
        phi = kernel.functions(y)
        rho = np.sum(phi * phi, axis=1)
        k2 = (phi @ phi_x) ** 2
        f = 1.0 / np.abs(spec.x - y)
        return np.stack([rho * f, k2 * f, rho * f * f, k2 * f * f], axis=1)

    nodes, weights = [], []
    for breaks in region_breakpoints(spec):
        result = adaptive_panels(integrand, breaks, tol=tol, order=PANEL_ORDER)
        nodes.append(result.nodes)
        weights.append(result.weights)
    nodes = np.concatenate(nodes) if nodes else np.empty(0)
    weights = np.concatenate(weights) if weights else np.empty(0)
    return TailMesh(nodes, weights, kernel.functions(nodes), phi_x, kxx)


def tail_terms(spec: TailIntegralSpec, tol: float = PANEL_TOL) -> Dict[str, float]:
    """All one- and two-dimensional pieces of A, B, C, D on the adaptive mesh."""
    mesh = tail_mesh(spec, tol)
    y, w = mesh.nodes, mesh.weights
    f = 1.0 / np.abs(spec.x - y)
    rho, k = mesh.rho, mesh.k
    kappa = mesh.kxx

    A = float(np.sum(w * f * rho))
    B1 = float(np.sum(w * f * k * k))
    G = mesh.phi.T @ ((w * f)[:, None] * mesh.phi)
    v = mesh.phi.T @ (w * f * k)
    C1 = float(np.sum(w * f * f * rho))
    C2 = max(A * A - float(np.sum(G * G)), 0.0)
    D1 = float(np.sum(w * f * f * k * k)) / kappa
    D2 = max(2.0 * A * B1 - 2.0 * float(v @ v), 0.0) / kappa
    outer = y >= spec.split
    return {"A": A, "B": B1 / kappa, "C": C1 + C2, "D": D1 + D2, "C1": C1, "C2": C2, "D1": D1, "D2": D2,
            "A_inner": float(np.sum((w * f * rho)[~outer])), "A_outer": float(np.sum((w * f * rho)[outer])),
            "kxx": kappa, "nodes": int(y.size)}


def tail_integral_A(spec: TailIntegralSpec) -> float:
    return tail_terms(spec)["A"]


def tail_integral_B(spec: TailIntegralSpec) -> float:
    return tail_terms(spec)["B"]


def tail_integral_C(spec: TailIntegralSpec) -> float:
    return tail_terms(spec)["C"]


def tail_integral_D(spec: TailIntegralSpec) -> float:
    return tail_terms(spec)["D"]


def palm_dominance(spec: TailIntegralSpec) -> float:
    """max over mesh nodes of k^2/kappa - rho, nonpositive by the Palm bound."""
    mesh = tail_mesh(spec)
    return float(np.max(mesh.k ** 2 / mesh.kxx - mesh.rho)) if mesh.nodes.size else 0.0


def tail_2d_tensor(spec: TailIntegralSpec, panels: Optional[int] = None, order: int = 8) -> Dict[str, float]:
    """
    Cross-check of the two-dimensional terms on a fixed tensor grid with kernel
    matrices from the Christoffel-Darboux form. Cost grows like the square of
    the grid, meant for small N.
    """
    kernel = LaguerreKernelN(spec.alpha, spec.N)
    t, wt = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    panels = 4 * spec.N + 8 if panels is None else panels
    for breaks in region_breakpoints(spec):
        if breaks.size == 2:
            breaks = sqrt_breakpoints(breaks[0], breaks[1], panels)
        a, b = breaks[:-1], breaks[1:]
        nodes.append((0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * t[None, :]).ravel())
        weights.append((0.5 * (b - a)[:, None] * wt[None, :]).ravel())
    y, w = np.concatenate(nodes), np.concatenate(weights)
    f = 1.0 / np.abs(spec.x - y)
    K = kernel.matrix(y).entries
    rho = np.diag(K)
    k = kernel(y, np.full_like(y, spec.x))
    kappa = float(kernel.diagonal(spec.x))
    wf = w * f
    rho2 = rho[:, None] * rho[None, :] - K * K
    palm_gap = (rho[:, None] * (k * k)[None, :] + (k * k)[:, None] * rho[None, :]
                - 2.0 * K * k[:, None] * k[None, :]) / kappa
    return {"C2": float(wf @ rho2 @ wf), "D2": float(wf @ palm_gap @ wf)}


def tail_bound_A(spec: TailIntegralSpec, c: Optional[float] = None) -> Dict[str, float]:
    """
    Bound A <= c int_{S, y <= 4N omega} dy / (|x - y| sqrt(y)) + N / (4N omega - r),
    c the empirical sup of sqrt(y) rho(y) on (0, 4N omega].
    """
    if c is None:
        y = np.geomspace(1e-3, spec.split, 4000)
        c = float(np.max(np.sqrt(y) * LaguerreKernelN(spec.alpha, spec.N).diagonal(y)))
    root_x = np.sqrt(spec.x)
    near = 0.0
    if spec.x - spec.s > 0:
        t = np.sqrt(spec.x - spec.s)
        near += np.log((root_x + t) / (root_x - t)) / root_x
    if spec.split > spec.x + spec.s:
        lo, hi = np.sqrt(spec.x + spec.s), np.sqrt(spec.split)
        near += (np.log((hi - root_x) / (hi + root_x)) - np.log((lo - root_x) / (lo + root_x))) / root_x
    far = spec.N / (spec.split - spec.r)
    return {"c": c, "near": float(c * near), "far": float(far), "bound": float(c * near + far)}


def signed_tail_conditions(spec: TailIntegralSpec) -> Dict[str, float]:
    """
    The four signed quantities with g(x, y) = 2/(x - y):

        L1 = int g rho
        L2 = int g (rho_x - rho)
        L3 = int g^2 rho - intint g g rho^2
        L4 = int g^2 (rho_x - rho) - intint g g (rho_x^2 - rho^2)
    """
    mesh = tail_mesh(spec)
    y, w = mesh.nodes, mesh.weights
    g = 2.0 / (spec.x - y)
    rho, k, kappa = mesh.rho, mesh.k, mesh.kxx
    S1 = float(np.sum(w * g * rho))
    Sb = float(np.sum(w * g * k * k))
    G = mesh.phi.T @ ((w * g)[:, None] * mesh.phi)
    v = mesh.phi.T @ (w * g * k)
    L3 = float(np.sum(w * g * g * rho)) - (S1 * S1 - float(np.sum(G * G)))
    L4 = -float(np.sum(w * g * g * k * k)) / kappa + (2.0 * S1 * Sb - 2.0 * float(v @ v)) / kappa
    return {"L1": S1, "L2": -Sb / kappa, "L3": L3, "L4": L4}


def tails_report(alpha: float, N_list: Iterable[int], x_list: Iterable[float], s_list: Iterable[float],
                 omega: float = 4.0, r: Optional[float] = None, margin: float = 0.05,
                 progress: bool = True) -> DiagnosticReport:
    """
    Trend checks of the tail integrals over the (N, x, s) grid: each of A, B, C, D
    non-increasing in s, the value at the largest s and N below 2/omega + margin,
    and the factored bounds C2 <= 2 A^2, D2 <= 4 A^2, A <= tail_bound_A.
    """
    N_list, x_list, s_list = [int(n) for n in N_list], [float(x) for x in x_list], sorted(float(s) for s in s_list)
    r = max(x_list) if r is None else r
    rows = []
    grid = [(N, x, s) for N in N_list for x in x_list for s in s_list]
    with tqdm(grid, dynamic_ncols=True, colour="#ff924a", disable=not progress) as data:
        for N, x, s in data:
            spec = TailIntegralSpec(alpha, N, x, s, r, omega)
            row = {"N": N, "x": x, "s": s}
            row.update(tail_terms(spec))
            row.update(signed_tail_conditions(spec))
            row.update({f"bound_{k}": v for k, v in tail_bound_A(spec).items()})
            rows.append(row)
            data.set_description(f"tails N={N} x={x:g} s={s:g}")
            data.set_postfix(A=row["A"])
    table = pd.DataFrame(rows)

    report = DiagnosticReport("tails", {"alpha": alpha, "N_list": N_list, "x_list": x_list, "s_list": s_list,
                                        "omega": omega, "r": r, "margin": margin})
    quantities = ("A", "B", "C", "D")
    increases = 0
    for (_, _), group in table.groupby(["N", "x"]):
        group = group.sort_values("s")
        for q in quantities:
            values = group[q].to_numpy()
            increases += int(np.sum(values[1:] > values[:-1] * (1.0 + 1e-9) + 1e-12))
    report.add("s_monotonicity_violations", increases, tolerance=0)
    last = table[(table["N"] == max(N_list)) & (table["s"] == max(s_list))]
    target = 2.0 / omega + margin
    for q in quantities:
        report.add(f"{q}_largest_s_N", float(last[q].max()), tolerance=target)
    report.add("C2_factored_violations", int(np.sum(table["C2"] > 2.0 * table["A"] ** 2 + 1e-12)), tolerance=0)
    report.add("D2_palm_violations", int(np.sum(table["D2"] > 4.0 * table["A"] ** 2 + 1e-12)), tolerance=0)
    report.add("A_bound_violations", int(np.sum(table["A"] > table["bound_bound"] * (1 + 1e-9))), tolerance=0)
    report.add("outer_part_violations", int(np.sum(table["A_outer"] > table["bound_far"] * (1 + 1e-9))),
               tolerance=0)
    report.tables["grid"] = table
    return report

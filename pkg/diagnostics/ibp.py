"""
Monte Carlo check of the integration-by-parts identity that defines the
logarithmic derivative d of the N-point ensemble:

    E sum_i d(x_i, s - x_i) f(x_i, s - x_i) = -E sum_i (d/dx) f(x_i, s - x_i),

d(x, s) = -1/4N + a/x + sum_j 2/(x - s_j) on the hard-edge scale. The
sum over particles with the particle removed from the configuration realizes
the reduced Campbell measure.
"""
import warnings
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np

from ensemble import EnsembleSpec, sample_batch, log_density_gradient
from utils.errors import DomainError, InsufficientDrawsWarning
from utils.report import DiagnosticReport
from utils.tools import default_workers


Z_LEVEL = 3.0
SE_FRACTION = 0.2


def bump(x, a: float = 1.0, b: float = 3.0):
    """Smooth bump exp(-1/(1 - t^2)) supported on [a, b] and its derivative."""
    x = np.asarray(x, dtype=float)
    t = (2.0 * x - a - b) / (b - a)
    inside = np.abs(t) < 1.0
    ts = np.where(inside, t, 0.0)
    value = np.where(inside, np.exp(-1.0 / (1.0 - ts * ts)), 0.0)
    slope = np.where(inside, value * (-2.0 * ts / (1.0 - ts * ts) ** 2) * (2.0 / (b - a)), 0.0)
    return value, slope


@dataclass(frozen=True)
class TestFunction:
    """
    f(x, s) = phi(x) g(s) with phi a bump and g a bounded functional of the
    configuration s. `evaluate` works on a whole configuration at once and
    returns f and df/dx at every particle with that particle taken out of s.
    """
    name: str
    evaluate: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]

    __test__ = False


def _plain_bump(x):
    return bump(x)


def _bump_count(x):
    phi, dphi = bump(x)
    inside = (x >= 0.0) & (x <= 2.0)
    others = np.count_nonzero(inside) - inside
    return phi / (1.0 + others), dphi / (1.0 + others)


def _bump_cosine(x):
    phi, dphi = bump(x)
    chi = np.exp(-x)
    others = np.sum(chi) - chi
    g = np.cos(others)
    return phi * g, dphi * g


def _zero(x):
    return np.zeros_like(x), np.zeros_like(x)


TEST_FUNCTIONS: Dict[str, TestFunction] = {
    "bump": TestFunction("bump", _plain_bump),
    "bump-count": TestFunction("bump-count", _bump_count),
    "bump-cosine": TestFunction("bump-cosine", _bump_cosine),
    "zero": TestFunction("zero", _zero),
}


def get_test_function(test_fn_id: str) -> TestFunction:
    if test_fn_id not in TEST_FUNCTIONS:
        raise DomainError(f"unknown test function {test_fn_id!r}, expected one of {sorted(TEST_FUNCTIONS)}")
    return TEST_FUNCTIONS[test_fn_id]


def ibp_sides(spec: EnsembleSpec, fn: TestFunction, configurations) -> Tuple[np.ndarray, np.ndarray]:
    """Per-draw left and right hand sides."""
    lhs, rhs = [], []
    for config in configurations:
        x = np.asarray(config.points if hasattr(config, "points") else config, dtype=float)
        f, df = fn.evaluate(x)
        lhs.append(float(np.sum(log_density_gradient(spec, x) * f)))
        rhs.append(float(-np.sum(df)))
    return np.asarray(lhs), np.asarray(rhs)


def ibp_identity_check(alpha: float, N: int, test_fn_id: str, draws: int, seed: int = 0, workers: int = None,
                       progress: bool = True, sampler: str = "tridiagonal") -> DiagnosticReport:
    """
    Both sides of the identity over `draws` ensemble draws, their standard
    errors and the paired difference in standard-error units.

    Warns with InsufficientDrawsWarning when the standard error of the left
    side exceeds 20% of its magnitude.
    """
    if draws < 2:
        raise DomainError(f"ibp_identity_check needs at least 2 draws, got {draws}")
    fn = get_test_function(test_fn_id)
    spec = EnsembleSpec(alpha, N, seed, sampler)
    workers = default_workers() if workers is None else workers
    configurations = sample_batch(spec, draws, workers=workers, progress=progress)
    lhs, rhs = ibp_sides(spec, fn, configurations)

    def stderr(v):
        return float(np.std(v, ddof=1) / np.sqrt(v.size))

    se_lhs, se_rhs, se_diff = stderr(lhs), stderr(rhs), stderr(lhs - rhs)
    diff = float(np.mean(lhs - rhs))
    z = 0.0 if diff == 0.0 and se_diff == 0.0 else abs(diff) / se_diff if se_diff > 0 else np.inf
    if se_lhs > SE_FRACTION * abs(np.mean(lhs)):
        warnings.warn(f"ibp {test_fn_id}: standard error {se_lhs:.3e} exceeds {SE_FRACTION:.0%} of "
                      f"|lhs| = {abs(np.mean(lhs)):.3e} with {draws} draws", InsufficientDrawsWarning)

    report = DiagnosticReport("ibp", {"alpha": alpha, "N": N, "test_fn": test_fn_id, "draws": draws,
                                      "seed": seed, "sampler": sampler})
    report.add("lhs", float(np.mean(lhs)))
    report.add("rhs", float(np.mean(rhs)))
    report.add("se_lhs", se_lhs)
    report.add("se_rhs", se_rhs)
    report.add("se_difference", se_diff)
    report.add("z_score", z, tolerance=Z_LEVEL)
    return report

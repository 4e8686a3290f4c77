"""
Labeled configurations of the N-point Laguerre ensemble and its density

    m(x) ~ exp(-sum x_i / 4N) prod x_j^alpha prod_{k<l} |x_k - x_l|^2

on the hard-edge scale. Three scales appear in the package:

    model      lambda, eigenvalues of the bidiagonal model, weight e^{-lambda/2}
    matrix     u = lambda / 2, weight u^alpha e^{-u}
    hard edge  x = 4N u = 2N lambda

and every conversion goes through the helpers below.
"""
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from specfun.laguerre import check_order
from utils.errors import DomainError


SCALES = ("hardedge", "matrix")
SAMPLERS = ("tridiagonal", "dpp-hkpv")


def model_to_hardedge(lam, N: int):
    return 2.0 * N * np.asarray(lam, dtype=float)


def matrix_to_hardedge(u, N: int):
    return 4.0 * N * np.asarray(u, dtype=float)


def hardedge_to_matrix(x, N: int):
    return np.asarray(x, dtype=float) / (4.0 * N)


def support_upper(N: int, alpha: float) -> float:
    """Matrix-scale point beyond which the one-point density is negligible."""
    return 4.0 * N + 2.0 * alpha + 20.0 * N ** (1.0 / 3.0) + 40.0


@dataclass(frozen=True)
class PointConfiguration:
    """Strictly increasing positive particle positions."""
    points: np.ndarray
    scale: str = "hardedge"

    def __post_init__(self):
        pts = np.atleast_1d(np.array(self.points, dtype=float)).ravel()
        if self.scale not in SCALES:
            raise DomainError(f"Unknown scale tag: {self.scale}")
        if pts.size == 0:
            raise DomainError("a configuration needs at least one point")
        if not np.all(np.isfinite(pts)) or pts[0] <= 0:
            raise DomainError(f"configuration points must be finite and positive, got min {pts.min()}")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("configuration points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    def __iter__(self):
        return iter(self.points)

    def to_hardedge(self, N: int) -> "PointConfiguration":
        if self.scale == "hardedge":
            return self
        return PointConfiguration(matrix_to_hardedge(self.points, N), "hardedge")

    def to_matrix(self, N: int) -> "PointConfiguration":
        if self.scale == "matrix":
            return self
        return PointConfiguration(hardedge_to_matrix(self.points, N), "matrix")


@dataclass(frozen=True)
class EnsembleSpec:
    alpha: float
    N: int
    seed: int = 0
    sampler: str = "tridiagonal"

    def __post_init__(self):
        check_order(self.alpha)
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"ensemble size N must be a positive integer, got {self.N}")
        if self.sampler not in SAMPLERS:
            raise DomainError(f"Unknown sampler: {self.sampler}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "seed", int(self.seed))


PointsLike = Union[PointConfiguration, Sequence[float], np.ndarray]


def _as_points(config: PointsLike) -> np.ndarray:
    if isinstance(config, PointConfiguration):
        return config.points
    return np.atleast_1d(np.asarray(config, dtype=float)).ravel()


def log_density(spec: EnsembleSpec, config: PointsLike) -> float:
    """
    -sum x_i / 4N + alpha sum log x_j + 2 sum_{k<l} log |x_l - x_k|, hard-edge scale.

    The normalizing constant is left out. Returns -inf when a coordinate is
    nonpositive or two coordinates coincide. Order of the points is irrelevant.
    """
    x = _as_points(config)
    if np.any(x <= 0):
        return -np.inf
    diff = np.abs(x[:, None] - x[None, :])[np.triu_indices(x.size, k=1)]
    if np.any(diff == 0):
        return -np.inf
    return float(-np.sum(x) / (4.0 * spec.N) + spec.alpha * np.sum(np.log(x)) + 2.0 * np.sum(np.log(diff)))


def log_density_gradient(spec: EnsembleSpec, config: PointsLike) -> np.ndarray:
    """d/dx_i log m = -1/4N + alpha/x_i + sum_{j != i} 2/(x_i - x_j)."""
    x = _as_points(config)
    if np.any(x <= 0):
        raise DomainError("log_density_gradient requires positive coordinates")
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, np.inf)
    if np.any(diff == 0):
        raise DomainError("log_density_gradient is singular at coinciding points")
    return -1.0 / (4.0 * spec.N) + spec.alpha / x + np.sum(2.0 / diff, axis=1)

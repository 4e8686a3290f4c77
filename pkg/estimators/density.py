"""
Histogram estimators of the correlation functions.

rho^1 on a bin is the mean number of particles in the bin per unit length;
rho^2 on a cell A x B is the mean number of ordered pairs of distinct
particles (i, j) with x_i in A and x_j in B per unit area, so diagonal cells
count k (k - 1).
"""
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
import pandas as pd

from utils.errors import DomainError


def _points(draw) -> np.ndarray:
    return np.asarray(getattr(draw, "points", draw), dtype=float).ravel()


def _check_edges(edges) -> np.ndarray:
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise DomainError("bin edges must be a strictly increasing sequence of at least two values")
    return edges


@dataclass
class BinnedDensity:
    edges: np.ndarray
    counts: np.ndarray
    draws: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def normalization(self) -> np.ndarray:
        return self.draws * self.widths

    @property
    def estimate(self) -> np.ndarray:
        return self.counts / self.normalization

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(self.counts) / self.normalization

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def integral(self) -> float:
        return float(np.sum(self.estimate * self.widths))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"bin_lo": self.edges[:-1], "bin_hi": self.edges[1:], "estimate": self.estimate,
                             "stderr": self.stderr, "count": self.counts})


@dataclass
class PairDensity2D:
    edges_y: np.ndarray
    edges_z: np.ndarray
    counts: np.ndarray
    sumsq: np.ndarray
    draws: int

    @property
    def area(self) -> np.ndarray:
        return np.outer(np.diff(self.edges_y), np.diff(self.edges_z))

    @property
    def estimate(self) -> np.ndarray:
        return self.counts / (self.draws * self.area)

    @property
    def stderr(self) -> np.ndarray:
        """Standard error from the per-draw spread of the pair counts."""
        mean = self.counts / self.draws
        var = np.maximum(self.sumsq / self.draws - mean * mean, 0.0)
        return np.sqrt(var / self.draws) / self.area

    def to_frame(self) -> pd.DataFrame:
        iy, iz = np.meshgrid(np.arange(self.counts.shape[0]), np.arange(self.counts.shape[1]), indexing="ij")
        iy, iz = iy.ravel(), iz.ravel()
        return pd.DataFrame({"y_lo": self.edges_y[iy], "y_hi": self.edges_y[iy + 1],
                             "z_lo": self.edges_z[iz], "z_hi": self.edges_z[iz + 1],
                             "estimate": self.estimate.ravel(), "stderr": self.stderr.ravel(),
                             "count": self.counts.ravel()})


def estimate_rho1(draws: Iterable, edges) -> BinnedDensity:
    edges = _check_edges(edges)
    counts = np.zeros(edges.size - 1)
    n = 0
    for draw in draws:
        counts += np.histogram(_points(draw), bins=edges)[0]
        n += 1
    if n == 0:
        raise DomainError("estimate_rho1 needs at least one draw")
    return BinnedDensity(edges, counts, n)


def estimate_rho2(draws: Iterable, edges_y, edges_z=None) -> PairDensity2D:
    edges_y = _check_edges(edges_y)
    edges_z = edges_y if edges_z is None else _check_edges(edges_z)
    shape = (edges_y.size - 1, edges_z.size - 1)
    total, sumsq = np.zeros(shape), np.zeros(shape)
    n = 0
    for draw in draws:
        x = _points(draw)
        hy = np.histogram(x, bins=edges_y)[0]
        hz = np.histogram(x, bins=edges_z)[0]
        # a particle lying in both bins must not pair with itself
        self_pairs = np.histogram2d(x, x, bins=[edges_y, edges_z])[0]
        pairs = np.outer(hy, hz) - self_pairs
        total += pairs
        sumsq += pairs * pairs
        n += 1
    if n == 0:
        raise DomainError("estimate_rho2 needs at least one draw")
    return PairDensity2D(edges_y, edges_z, total, sumsq, n)


def merge_binned(a: BinnedDensity, b: BinnedDensity) -> BinnedDensity:
    if not np.array_equal(a.edges, b.edges):
        raise DomainError("cannot merge densities with different edges")
    return BinnedDensity(a.edges, a.counts + b.counts, a.draws + b.draws)


def merge_pair(a: PairDensity2D, b: PairDensity2D) -> PairDensity2D:
    if not (np.array_equal(a.edges_y, b.edges_y) and np.array_equal(a.edges_z, b.edges_z)):
        raise DomainError("cannot merge pair densities with different edges")
    return PairDensity2D(a.edges_y, a.edges_z, a.counts + b.counts, a.sumsq + b.sumsq, a.draws + b.draws)


def auto_edges(pilot: Iterable, draws: int, target: int = 100, lo: float = 0.0,
               hi: Optional[float] = None) -> np.ndarray:
    """
    Edges with at least `target` expected counts per bin in a run of `draws`
    draws, from the empirical quantiles of a pilot sample.
    """
    pilot = list(pilot)
    if not pilot:
        raise DomainError("auto_edges needs a nonempty pilot sample")
    pooled = np.sort(np.concatenate([_points(d) for d in pilot]))
    per_bin = int(np.ceil(target * len(pilot) / draws))
    if per_bin >= pooled.size:
        inner = np.empty(0)
    else:
        inner = pooled[per_bin::per_bin]
        # the last bin keeps at least per_bin pilot points
        if pooled.size - per_bin * inner.size < per_bin:
            inner = inner[:-1]
    upper = pooled[-1] * (1.0 + 1e-12) + 1e-300 if hi is None else hi
    edges = np.unique(np.concatenate([[lo], inner[(inner > lo) & (inner < upper)], [upper]]))
    return _check_edges(edges)


def far_drift_moment(draws: Iterable, s: float, r: float):
    """
    Monte Carlo estimate of the far-field drift second moment

        E[ sum_{i: x_i <= r} ( sum_{j: |x_i - x_j| >= s} 2/(x_i - x_j) )^2 ],

    returned as (value, standard error).
    """
    per_draw = []
    for draw in draws:
        x = _points(draw)
        diff = x[:, None] - x[None, :]
        far = np.abs(diff) >= s
        np.fill_diagonal(far, False)
        w = np.sum(np.where(far, 2.0 / np.where(far, diff, 1.0), 0.0), axis=1)
        per_draw.append(np.sum(w[x <= r] ** 2))
    if not per_draw:
        raise DomainError("far_drift_moment needs at least one draw")
    per_draw = np.asarray(per_draw)
    se = per_draw.std(ddof=1) / np.sqrt(per_draw.size) if per_draw.size > 1 else np.inf
    return float(per_draw.mean()), float(se)

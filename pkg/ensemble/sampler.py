"""
Exact samplers of the N-point Laguerre ensemble.

tridiagonal: eigenvalues of T = B B^T with B lower bidiagonal,
    B_ii ~ chi_{2(N+alpha) - 2i},  B_{i+1,i} ~ chi_{2(N-1-i)},   i = 0..N-1,
whose eigenvalue density is prod lambda^alpha e^{-lambda/2} |Delta(lambda)|^2.

dpp-hkpv: sequential sampling of the projection kernel with eigenfunctions
phi_0..phi_{N-1}, the conditional density of each new point being
||P^T phi(u)||^2 / (N - j) and the basis P deflated after every point.
"""
from functools import lru_cache, partial
from typing import List

import numpy as np
from scipy.linalg import eigh_tridiagonal, null_space

from ensemble.configuration import (EnsembleSpec, PointConfiguration, model_to_hardedge,
                                    matrix_to_hardedge, support_upper)
from specfun.laguerre import orthonormal_functions
from utils.errors import DomainError, SamplerError
from utils.tools import stream, chunk_indices, parallel_map


MAX_TRIES = 3
# nodes of the HKPV inverse-CDF grid: base + per particle
HKPV_GRID_BASE = 4000
HKPV_GRID_PER_PARTICLE = 200


def _valid(values: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(values)) and values[0] > 0 and np.all(np.diff(values) > 0))


def tridiagonal_draw(alpha: float, N: int, rng: np.random.Generator) -> np.ndarray:
    """One draw on the model scale (weight e^{-lambda/2}), ascending."""
    i = np.arange(N)
    d = np.sqrt(rng.chisquare(2.0 * (N + alpha) - 2.0 * i))
    s = np.sqrt(rng.chisquare(2.0 * (N - 1 - i[:-1]))) if N > 1 else np.empty(0)
    diag = d * d
    diag[1:] += s * s
    if N == 1:
        return diag
    off = s * d[:-1]
    return eigh_tridiagonal(diag, off, eigvals_only=True)


@lru_cache(maxsize=16)
def _hkpv_grid(N: int, alpha: float):
    # quadratic clustering toward the hard edge
    n = HKPV_GRID_BASE + HKPV_GRID_PER_PARTICLE * N
    grid = support_upper(N, alpha) * np.linspace(0.0, 1.0, n) ** 2
    phi = orthonormal_functions(N, alpha, grid)
    grid.setflags(write=False)
    phi.setflags(write=False)
    return grid, phi


def _inverse_linear_cdf(grid: np.ndarray, dens: np.ndarray, uniform: float) -> float:
    # sample from the piecewise linear density through its nodal values
    h = np.diff(grid)
    mass = 0.5 * h * (dens[:-1] + dens[1:])
    cum = np.cumsum(mass)
    target = uniform * cum[-1]
    k = min(int(np.searchsorted(cum, target)), cum.size - 1)
    rest = target - (cum[k - 1] if k > 0 else 0.0)
    fa, fb, width = dens[k], dens[k + 1], h[k]
    slope = (fb - fa) / width
    if abs(slope) * width < 1e-12 * max(fa, 1e-300):
        t = rest / fa if fa > 0 else 0.5 * width
    else:
        # fa t + slope t^2 / 2 = rest
        t = (-fa + np.sqrt(max(fa * fa + 2.0 * slope * rest, 0.0))) / slope
    return float(grid[k] + min(max(t, 0.0), width))


def hkpv_draw(alpha: float, N: int, rng: np.random.Generator) -> np.ndarray:
    """One draw on the matrix scale, ascending."""
    grid, phi = _hkpv_grid(N, alpha)
    basis = np.eye(N)
    points = []
    for j in range(N):
        proj = phi @ basis
        dens = np.sum(proj * proj, axis=1) / (N - j)
        u = _inverse_linear_cdf(grid, dens, rng.random())
        while u <= 0.0 or u in points:
            u = _inverse_linear_cdf(grid, dens, rng.random())
        points.append(u)
        if j < N - 1:
            v = orthonormal_functions(N, alpha, np.array([u]))[0] @ basis
            basis = basis @ null_space(v[None, :])
    return np.sort(np.array(points))


def sample(spec: EnsembleSpec, draw: int = 0) -> PointConfiguration:
    """
    One exact draw on the hard-edge scale.

    The stream of draw `draw` is keyed by (seed, draw, stage); a stage is
    retried with stage + 1 when the eigen-solve returns an invalid spectrum.
    """
    last = None
    for stage in range(MAX_TRIES):
        rng = stream(spec.seed, draw, stage)
        try:
            if spec.sampler == "tridiagonal":
                x = model_to_hardedge(tridiagonal_draw(spec.alpha, spec.N, rng), spec.N)
            else:
                x = matrix_to_hardedge(hkpv_draw(spec.alpha, spec.N, rng), spec.N)
        except (np.linalg.LinAlgError, ValueError) as err:
            last = err
            continue
        if _valid(x):
            return PointConfiguration(x, "hardedge")
        last = f"invalid spectrum, min {np.min(x):.3e}"
    raise SamplerError(f"{spec.sampler} sampler failed after {MAX_TRIES} tries at draw {draw}: {last}")


def _sample_chunk(spec: EnsembleSpec, indices: np.ndarray) -> List[np.ndarray]:
    out = []
    for i in indices:
        try:
            out.append(sample(spec, int(i)).points)
        except SamplerError as err:
            raise SamplerError(f"draw {int(i)}: {err}") from err
    return out


def sample_batch(spec: EnsembleSpec, count: int, workers: int = 1, progress: bool = True,
                 start: int = 0) -> List[PointConfiguration]:
    """
    `count` independent draws with indices start..start+count-1. Draw i uses the
    stream (seed, i, stage) so the output does not depend on `workers`.
    """
    if int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count}")
    indices = np.arange(start, start + int(count))
    chunks = [indices[c] for c in chunk_indices(indices.size, workers)]
    results = parallel_map(partial(_sample_chunk, spec), chunks, workers=workers,
                           desc=f"sample {spec.sampler} N={spec.N}", progress=progress)
    return [PointConfiguration(points, "hardedge") for chunk in results for points in chunk]

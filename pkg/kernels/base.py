from dataclasses import dataclass
from typing import Callable

import numpy as np

from utils.errors import DomainError


# relative half-width of the band where kernels switch to the diagonal form
DIAG_THRESHOLD = 1e-4


def check_positive(name: str, value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} must be positive, got {value}")
    return arr


def near_diagonal_blend(off: Callable, diag: Callable, x: np.ndarray, y: np.ndarray,
                        delta: float = DIAG_THRESHOLD) -> np.ndarray:
    """
    Evaluate a symmetric kernel from its off-diagonal ratio form `off(x, y)`
    and its confluent diagonal `diag(m)`.

    Pairs with |x - y| < delta * max(1, m), m the midpoint, use the second order
    expansion K(m - d/2, m + d/2) = K(m, m) + c d^2, with c fitted from one
    off-diagonal evaluation at the band edge. x, y are flat arrays of equal size.
    """
    m = 0.5 * (x + y)
    d = y - x
    band = delta * np.maximum(1.0, m)
    near = np.abs(d) < band
    out = np.empty_like(m)
    far = ~near
    if np.any(far):
        out[far] = off(x[far], y[far])
    if np.any(near):
        mid = m[near]
        width = np.minimum(band[near], mid)
        f0 = diag(mid)
        f_edge = off(mid - 0.5 * width, mid + 0.5 * width)
        out[near] = f0 + (f_edge - f0) * (d[near] / width) ** 2
    return out


@dataclass(frozen=True)
class KernelMatrix:
    """Gram matrix [K(x_i, x_j)] on an ordered list of points."""
    points: np.ndarray
    entries: np.ndarray

    @classmethod
    def build(cls, kernel, points) -> "KernelMatrix":
        pts = np.atleast_1d(np.asarray(points, dtype=float)).ravel()
        entries = np.asarray(kernel(pts[:, None], pts[None, :]), dtype=float)
        entries = 0.5 * (entries + entries.T)
        entries[np.diag_indices_from(entries)] = kernel.diagonal(pts)
        return cls(pts, entries)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.entries, axis=1)


class Kernel:
    """
    Common surface of the determinantal kernels: scalar or broadcast evaluation
    through `__call__`, `diagonal` for rho^1 and `matrix` for Gram matrices.
    """

    def __call__(self, x, y):
        raise NotImplementedError

    def diagonal(self, x):
        raise NotImplementedError

    def matrix(self, points) -> KernelMatrix:
        return KernelMatrix.build(self, points)

    @staticmethod
    def _shape_out(x, out):
        return float(out) if np.ndim(x) == 0 else out

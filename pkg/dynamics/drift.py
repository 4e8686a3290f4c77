"""
Drift fields of the particle dynamics.

The SDE drift is half the logarithmic derivative of the ensemble:

    finite-n:  -1/8N + alpha/(2 x_i) + sum_{j != i} 1/(x_i - x_j)
    isde:       alpha/(2 x_i) + sum_{j != i, |x_i - x_j| < R} 1/(x_i - x_j)

In isde mode only the lowest `window` particles move.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from specfun.laguerre import check_order
from utils.errors import DomainError, SingularDriftError


MODES = ("finite-n", "isde")


@dataclass(frozen=True)
class DriftSpec:
    alpha: float
    mode: str = "finite-n"
    N: Optional[int] = None
    window: Optional[int] = None
    cutoff: float = np.inf

    def __post_init__(self):
        check_order(self.alpha)
        if self.mode not in MODES:
            raise DomainError(f"Unknown drift mode: {self.mode}")
        if self.mode == "finite-n" and (self.N is None or self.N < 1):
            raise DomainError(f"finite-n drift needs an ensemble size N >= 1, got {self.N}")
        if self.mode == "isde" and self.window is not None and self.window < 1:
            raise DomainError(f"isde window must be positive, got {self.window}")
        if not self.cutoff > 0:
            raise DomainError(f"interaction cutoff must be positive, got {self.cutoff}")

    @property
    def confinement(self) -> float:
        return -1.0 / (8.0 * self.N) if self.mode == "finite-n" else 0.0

    @property
    def interaction_cutoff(self) -> float:
        return self.cutoff if self.mode == "isde" else np.inf

    def active(self, size: int) -> int:
        """Number of moving particles, always the lowest ones."""
        if self.mode == "finite-n" or self.window is None:
            return size
        return min(self.window, size)


def _check_floors(x, active, origin_floor, collision_floor):
    if np.any(x[:active] <= origin_floor):
        raise SingularDriftError(f"particle within origin floor {origin_floor:.1e}: min {x[:active].min():.3e}")
    gaps = np.diff(x)[:active]
    if gaps.size and np.any(gaps <= collision_floor):
        raise SingularDriftError(f"gap within collision floor {collision_floor:.1e}: min {gaps.min():.3e}")


def drift_vector(spec: DriftSpec, x, origin_floor: float = 0.0, collision_floor: float = 0.0) -> np.ndarray:
    """Drift of every active particle of the ordered configuration `x`."""
    x = np.asarray(x, dtype=float)
    active = spec.active(x.size)
    _check_floors(x, active, origin_floor, collision_floor)
    diff = x[:active, None] - x[None, :]
    diff[np.arange(active), np.arange(active)] = np.inf
    with np.errstate(divide="ignore"):
        pair = np.where(np.abs(diff) < spec.interaction_cutoff, 1.0 / diff, 0.0)
    return spec.confinement + spec.alpha / (2.0 * x[:active]) + np.sum(pair, axis=1)


def drift(spec: DriftSpec, i: int, config, origin_floor: float = 0.0, collision_floor: float = 0.0) -> float:
    """Drift of particle i."""
    x = np.asarray(getattr(config, "points", config), dtype=float)
    if not 0 <= i < spec.active(x.size):
        raise IndexError(f"particle index {i} outside the active range of {spec.active(x.size)}")
    return float(drift_vector(spec, x, origin_floor, collision_floor)[i])


def interaction_sum(spec: DriftSpec, x) -> float:
    """sum over all particles of the pair part of the drift, zero by antisymmetry."""
    x = np.asarray(x, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, np.inf)
    with np.errstate(divide="ignore"):
        pair = np.where(np.abs(diff) < spec.interaction_cutoff, 1.0 / diff, 0.0)
    return float(np.sum(pair))

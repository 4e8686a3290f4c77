from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_legendre

from utils.errors import QuadratureError


PANEL_ORDER = 16
PANEL_TOL = 1e-8
MAX_ROUNDS = 80
MAX_PANELS = 200000


@dataclass
class QuadratureResult:
    """Integral, error estimate and the accepted nodes/weights (reusable as a fixed rule)."""
    value: np.ndarray
    error: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    panels: int


@lru_cache(maxsize=8)
def _rule(n):
    t, w = roots_legendre(n)
    return t, w


def adaptive_panels(func: Callable, breakpoints: Sequence[float], tol: float = PANEL_TOL,
                    order: int = PANEL_ORDER, rel_tol: float = 1e-10) -> QuadratureResult:
    """
    Adaptive Gauss-Legendre quadrature on panels.

    Every panel is integrated with `order` and 2*`order` nodes; a panel is
    accepted when the two rules differ by at most max(tol, rel_tol * |I|) in
    every component, otherwise it is bisected. `func` maps an array of nodes of
    shape (n,) to values of shape (n,) or (n, m), all panels of a round being
    evaluated in one call.
    """
    t1, w1 = _rule(order)
    t2, w2 = _rule(2 * order)
    edges = np.asarray(breakpoints, dtype=float)
    panels = np.stack([edges[:-1], edges[1:]], axis=1)
    panels = panels[panels[:, 1] > panels[:, 0]]

    value, error = 0.0, 0.0
    nodes, weights = [], []
    count = 0
    for _ in range(MAX_ROUNDS):
        if panels.shape[0] == 0:
            break
        mid = 0.5 * (panels[:, 0] + panels[:, 1])
        half = 0.5 * (panels[:, 1] - panels[:, 0])
        x1 = (mid[:, None] + half[:, None] * t1[None, :]).ravel()
        x2 = (mid[:, None] + half[:, None] * t2[None, :]).ravel()
        f = np.asarray(func(np.concatenate([x1, x2])), dtype=float)
        f1 = f[:x1.size].reshape((panels.shape[0], order) + f.shape[1:])
        f2 = f[x1.size:].reshape((panels.shape[0], 2 * order) + f.shape[1:])
        i1 = np.einsum("pk...,k->p...", f1, w1) * half.reshape((-1,) + (1,) * (f.ndim - 1))
        i2 = np.einsum("pk...,k->p...", f2, w2) * half.reshape((-1,) + (1,) * (f.ndim - 1))
        diff = np.abs(i2 - i1)
        bound = np.maximum(tol, rel_tol * np.abs(i2))
        ok = np.all((diff <= bound).reshape(panels.shape[0], -1), axis=1)
        tiny = half <= 1e-15 * np.maximum(1.0, np.abs(mid))
        if not np.all(np.isfinite(i2)):
            raise QuadratureError("non-finite integrand values")
        done = ok | tiny
        value = value + np.sum(i2[done], axis=0)
        error = error + np.sum(diff[done], axis=0)
        nodes.append(x2.reshape(panels.shape[0], -1)[done].ravel())
        weights.append((half[done, None] * w2[None, :]).ravel())
        count += int(np.count_nonzero(done))

        rest = panels[~done]
        mid_rest = 0.5 * (rest[:, 0] + rest[:, 1])
        panels = np.concatenate([np.stack([rest[:, 0], mid_rest], axis=1),
                                 np.stack([mid_rest, rest[:, 1]], axis=1)])
        if panels.shape[0] > MAX_PANELS:
            raise QuadratureError(f"adaptive quadrature needs more than {MAX_PANELS} panels")
    else:
        if panels.shape[0]:
            raise QuadratureError(f"adaptive quadrature did not converge after {MAX_ROUNDS} rounds")
    return QuadratureResult(np.asarray(value), np.asarray(error), np.concatenate(nodes),
                            np.concatenate(weights), count)


def sqrt_breakpoints(a: float, b: float, panels: int) -> np.ndarray:
    """Breakpoints uniform in sqrt(y) on [a, b], matching the oscillation of hard-edge kernels."""
    return np.linspace(np.sqrt(a), np.sqrt(b), panels + 1) ** 2

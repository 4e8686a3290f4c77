from typing import Sequence, Tuple

import numpy as np
from scipy import stats

from utils.errors import DomainError


def ks_distance(sample_a: Sequence[float], sample_b: Sequence[float]) -> Tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and p-value."""
    a = np.asarray(sample_a, dtype=float).ravel()
    b = np.asarray(sample_b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise DomainError("ks_distance needs two nonempty samples")
    result = stats.ks_2samp(a, b)
    return float(result.statistic), float(result.pvalue)


def smallest_particles(draws) -> np.ndarray:
    return np.array([np.min(getattr(d, "points", d)) for d in draws])

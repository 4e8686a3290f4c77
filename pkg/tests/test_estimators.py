import numpy as np
import pytest

from ensemble import EnsembleSpec, PointConfiguration, sample_batch
from estimators import (estimate_rho1, estimate_rho2, merge_binned, merge_pair, auto_edges, far_drift_moment,
                        ks_distance, smallest_particles)
from kernels import LaguerreKernelN
from utils.errors import DomainError


DRAWS = [PointConfiguration([0.5, 1.5, 2.5]), PointConfiguration([0.2, 0.7, 3.5]), [1.2, 2.2, 2.8]]


def test_rho1_counts_and_normalization():
    rho = estimate_rho1(DRAWS, [0.0, 1.0, 2.0, 4.0])
    np.testing.assert_array_equal(rho.counts, [3, 2, 4])
    np.testing.assert_allclose(rho.estimate, [1.0, 2.0 / 3.0, 4.0 / 6.0])
    np.testing.assert_allclose(rho.stderr, np.sqrt([3, 2, 4]) / np.array([3.0, 3.0, 6.0]))
    assert rho.integral() == pytest.approx(3.0)
    frame = rho.to_frame()
    assert list(frame.columns) == ["bin_lo", "bin_hi", "estimate", "stderr", "count"]


def test_rho1_rejects_bad_input():
    with pytest.raises(DomainError):
        estimate_rho1(DRAWS, [0.0, 2.0, 1.0])
    with pytest.raises(DomainError):
        estimate_rho1([], [0.0, 1.0])


def test_rho2_counts_ordered_distinct_pairs():
    rho = estimate_rho2(DRAWS, [0.0, 1.0, 2.0, 4.0])
    # diagonal cells hold k (k - 1) per draw, off-diagonal cells k_a k_b
    np.testing.assert_array_equal(rho.counts, [[2, 1, 3], [1, 0, 3], [3, 3, 2]])
    assert np.allclose(rho.counts, rho.counts.T)
    # three draws of three particles, all inside the edges
    assert rho.counts.sum() == 3 * (3 * 2)
    assert rho.to_frame().shape[0] == 9


def test_rho2_single_particle_has_no_pairs():
    rho = estimate_rho2([[1.0]], [0.0, 2.0])
    assert rho.counts.sum() == 0
    assert rho.stderr.sum() == 0


def test_merge():
    edges = [0.0, 1.0, 2.0, 4.0]
    merged = merge_binned(estimate_rho1(DRAWS[:1], edges), estimate_rho1(DRAWS[1:], edges))
    whole = estimate_rho1(DRAWS, edges)
    np.testing.assert_array_equal(merged.counts, whole.counts)
    assert merged.draws == 3
    pair = merge_pair(estimate_rho2(DRAWS[:2], edges), estimate_rho2(DRAWS[2:], edges))
    np.testing.assert_array_equal(pair.counts, estimate_rho2(DRAWS, edges).counts)
    with pytest.raises(DomainError):
        merge_binned(whole, estimate_rho1(DRAWS, [0.0, 4.0]))


def test_auto_edges_reach_target():
    rng = np.random.default_rng(2)
    draws = [np.sort(rng.exponential(5.0, 20)) for _ in range(200)]
    edges = auto_edges(draws[:50], len(draws), target=100)
    rho = estimate_rho1(draws, edges)
    assert edges[0] == 0.0 and np.all(np.diff(edges) > 0)
    assert rho.counts.sum() > 0.99 * 20 * 200
    assert np.median(rho.counts) >= 80


def test_far_drift_moment():
    value, se = far_drift_moment([[1.0, 10.0]], s=5.0, r=2.0)
    assert value == pytest.approx(4.0 / 81.0)
    assert se == np.inf
    value, _ = far_drift_moment([[1.0, 3.0]], s=5.0, r=2.0)
    assert value == 0.0


def test_ks_distance():
    stat, p = ks_distance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert stat == 0.0 and p == pytest.approx(1.0)
    stat, p = ks_distance(np.arange(50.0), np.arange(50.0) + 100.0)
    assert stat == 1.0 and p < 1e-10
    with pytest.raises(DomainError):
        ks_distance([], [1.0])


def test_smallest_particles():
    np.testing.assert_array_equal(smallest_particles(DRAWS), [0.5, 0.2, 1.2])


def _cell_average(kernel, edges, i, j, order=8):
    t, w = np.polynomial.legendre.leggauss(order)
    y = edges[i] + 0.5 * (t + 1.0) * (edges[i + 1] - edges[i])
    z = edges[j] + 0.5 * (t + 1.0) * (edges[j + 1] - edges[j])
    Y, Z = np.meshgrid(y, z, indexing="ij")
    rho2 = kernel.diagonal(Y) * kernel.diagonal(Z) - kernel(Y, Z) ** 2
    return float(np.sum(np.outer(w, w) * rho2) / 4.0)


@pytest.fixture(scope="module")
def ensemble_draws():
    return sample_batch(EnsembleSpec(1.0, 20, seed=3), 3000, progress=False)


def test_rho2_matches_determinant_formula(ensemble_draws):
    edges = np.linspace(1.0, 13.0, 7)
    rho = estimate_rho2(ensemble_draws, edges)
    kernel = LaguerreKernelN(1.0, 20)
    exact = np.array([[_cell_average(kernel, edges, i, j) for j in range(6)] for i in range(6)])
    z = np.abs(rho.estimate - exact) / np.where(rho.stderr > 0, rho.stderr, np.inf)
    assert np.sum(z <= 3.0) >= 34
    assert z.max() <= 4.5


def test_rho2_repulsion_deficit_on_diagonal(ensemble_draws):
    edges = np.linspace(1.0, 13.0, 7)
    rho1 = estimate_rho1(ensemble_draws, edges)
    rho2 = estimate_rho2(ensemble_draws, edges)
    deficit = np.outer(rho1.estimate, rho1.estimate) - rho2.estimate
    assert np.all(np.diag(deficit) > 3.0 * np.diag(rho2.stderr))
    assert np.all(np.diag(rho2.estimate) < 0.5 * rho1.estimate ** 2)


def test_ks_distance_is_invariant_under_monotone_maps():
    rng = np.random.default_rng(4)
    a, b = rng.gamma(2.0, 4.0, 300), rng.gamma(2.2, 4.0, 250)
    stat, p = ks_distance(a, b)
    for f in (np.log, np.sqrt, lambda v: 3.0 * v + 7.0):
        stat_f, p_f = ks_distance(f(a), f(b))
        assert stat_f == pytest.approx(stat, abs=1e-15)
        assert p_f == pytest.approx(p, rel=1e-12)

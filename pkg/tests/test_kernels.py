import math

import numpy as np
import pytest

from kernels import (BesselKernel, LaguerreKernelN, PalmKernelN, KernelMatrix, bessel_kernel_eval,
                     bessel_kernel_integral, laguerre_kernel_eval, palm_kernel_eval, m_function, diagonal_via_m,
                     correlation_fn, hadamard_report, kernel_convergence_report, envelope_report,
                     nystrom_operator_report, trace_report, convergence_grid)
from utils.errors import DegenerateConditioningError, DomainError


@pytest.mark.parametrize("N", [1, 2, 5, 12])
@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_cd_form_matches_sum_form(N, alpha):
    rng = np.random.default_rng(17)
    u = rng.uniform(0.01, 30.0, 1000)
    v = rng.uniform(0.01, 30.0, 1000)
    kernel = LaguerreKernelN(alpha, N, rescaled=False)
    cd = laguerre_kernel_eval(kernel, u, v, form="cd")
    direct = laguerre_kernel_eval(kernel, u, v, form="sum")
    scale = np.sqrt(kernel.diagonal(u) * kernel.diagonal(v))
    np.testing.assert_allclose(cd, direct, rtol=1e-9, atol=1e-9 * scale.max())


def test_auto_form_near_diagonal():
    kernel = LaguerreKernelN(1.0, 30)
    x = np.array([0.5, 3.0, 12.0, 80.0])
    for d in (0.0, 1e-9, 1e-6, 1e-3):
        np.testing.assert_allclose(kernel(x, x + d), laguerre_kernel_eval(kernel, x, x + d, form="sum"),
                                   rtol=1e-7, atol=1e-12)


def test_kernel_symmetry_and_diagonal():
    kernel = LaguerreKernelN(2.0, 40)
    x = np.linspace(0.2, 60.0, 37)
    values = kernel(x[:, None], x[None, :])
    np.testing.assert_allclose(values, values.T, rtol=1e-10, atol=1e-14)
    phi = kernel.functions(x)
    np.testing.assert_allclose(kernel.diagonal(x), np.sum(phi * phi, axis=1), rtol=1e-10)


def test_kernel_scales_agree():
    N = 25
    edge = LaguerreKernelN(1.0, N)
    matrix = LaguerreKernelN(1.0, N, rescaled=False)
    x = np.array([0.3, 4.0, 50.0])
    np.testing.assert_allclose(edge.diagonal(x), matrix.diagonal(x / (4.0 * N)) / (4.0 * N), rtol=1e-12)


def test_kernel_large_N_is_finite():
    kernel = LaguerreKernelN(1.0, 400)
    x = np.geomspace(1e-3, 1e5, 200)
    assert np.all(np.isfinite(kernel.diagonal(x)))
    assert np.all(kernel.diagonal(x) >= 0)


def test_kernel_rejects_nonpositive_points():
    with pytest.raises(DomainError):
        LaguerreKernelN(1.0, 5)(0.0, 1.0)
    with pytest.raises(DomainError):
        LaguerreKernelN(-1.0, 5)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
def test_bessel_kernel_against_integral(alpha):
    for x, y in [(0.5, 2.0), (3.0, 3.5), (10.0, 1.0), (4.0, 4.0)]:
        assert bessel_kernel_eval(alpha, x, y) == pytest.approx(bessel_kernel_integral(alpha, x, y), rel=1e-7,
                                                                abs=1e-12)


def test_bessel_kernel_continuous_at_diagonal():
    kernel = BesselKernel(1.0)
    x = np.array([0.7, 5.0, 30.0])
    np.testing.assert_allclose(kernel(x, x + 1e-7), kernel.diagonal(x), rtol=1e-6)
    np.testing.assert_allclose(kernel(x, x + 1e-2), [bessel_kernel_integral(1.0, a, a + 1e-2) for a in x], rtol=1e-6)


def test_hard_edge_convergence_decreases():
    for alpha in (0.0, 1.0):
        report = kernel_convergence_report(alpha, [25, 50, 100, 200], progress=False)
        assert report["non_decreasing_steps"].passed
        assert report["sup_N200"].value < report["sup_N25"].value


def test_convergence_grid_excludes_origin():
    grid = convergence_grid(10.0, 50)
    assert grid.min() > 0 and grid.max() == pytest.approx(10.0)
    with pytest.raises(DomainError):
        kernel_convergence_report(1.0, [50, 25], progress=False)


def test_palm_kernel():
    base = LaguerreKernelN(1.0, 20)
    palm = PalmKernelN(base, 2.0)
    assert palm(2.0, 5.0) == 0.0
    assert palm.diagonal(2.0) == 0.0
    y = np.linspace(0.1, 30.0, 50)
    assert np.all(palm.diagonal(y) <= base.diagonal(y) + 1e-15)
    assert np.all(palm.diagonal(y) >= -1e-12)
    assert palm_kernel_eval(palm, 1.0, 3.0) == pytest.approx(
        base(1.0, 3.0) - base(1.0, 2.0) * base(2.0, 3.0) / base.diagonal(2.0))


def test_palm_degenerate_conditioning():
    with pytest.raises(DegenerateConditioningError):
        PalmKernelN(LaguerreKernelN(2.0, 10), 1e-9)


def test_correlation_functions():
    kernel = LaguerreKernelN(1.0, 15)
    assert correlation_fn(kernel, [3.0]) == pytest.approx(kernel.diagonal(3.0))
    expected = kernel.diagonal(1.0) * kernel.diagonal(4.0) - kernel(1.0, 4.0) ** 2
    assert correlation_fn(kernel, [1.0, 4.0]) == pytest.approx(expected, rel=1e-10)
    assert correlation_fn(kernel, [4.0, 1.0]) == pytest.approx(expected, rel=1e-10)
    with pytest.raises(DomainError):
        correlation_fn(kernel, [1.0, 1.0])
    with pytest.raises(DomainError):
        correlation_fn(kernel, [])


def test_nearby_points_repel():
    kernel = LaguerreKernelN(1.0, 15)
    assert correlation_fn(kernel, [2.0, 2.0 + 1e-3]) < 1e-4 * kernel.diagonal(2.0) ** 2


def test_hadamard_bounds():
    report = hadamard_report(LaguerreKernelN(1.0, 30), [0.5, 1.7, 4.0, 9.0, 20.0])
    assert report.passed


def test_kernel_matrix_is_psd():
    km = KernelMatrix.build(LaguerreKernelN(0.5, 20), np.linspace(0.1, 40.0, 60))
    assert km.size == 60
    assert km.min_eigenvalue() > -1e-10
    assert km.trace == pytest.approx(np.sum(LaguerreKernelN(0.5, 20).diagonal(np.linspace(0.1, 40.0, 60))))


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0])
def test_m_function_identity(alpha):
    N = 40
    y = np.geomspace(0.01, 200.0, 50)
    np.testing.assert_allclose(diagonal_via_m(N, alpha, y), LaguerreKernelN(alpha, N).diagonal(y), rtol=1e-10)
    assert np.all(np.isfinite(m_function(N, alpha, y / (4.0 * N))))


def test_trace_identity():
    report = trace_report(1.0, 10)
    assert report["trace_error"].passed


def test_operator_bound():
    report = nystrom_operator_report(LaguerreKernelN(1.0, 20), r=20.0, nodes=200)
    assert report.passed


def test_edge_envelope():
    report = envelope_report(1.0, [50, 200])
    assert report["relative_spread"].passed
    assert 0.0 < report["empirical_c"].value < 1.0


@pytest.mark.parametrize("kernel", [LaguerreKernelN(1.0, 12), LaguerreKernelN(0.0, 40), BesselKernel(2.0)],
                         ids=["laguerre-12", "laguerre-40", "bessel"])
def test_schwarz_bound(kernel):
    rng = np.random.default_rng(5)
    x = rng.uniform(0.01, 60.0, 500)
    y = rng.uniform(0.01, 60.0, 500)
    assert np.all(kernel(x, y) ** 2 <= kernel.diagonal(x) * kernel.diagonal(y) * (1.0 + 1e-10) + 1e-300)


@pytest.mark.parametrize("kernel", [LaguerreKernelN(0.5, 10), BesselKernel(1.0)], ids=["laguerre", "bessel"])
def test_kernel_matrices_of_random_points_are_psd(kernel):
    rng = np.random.default_rng(23)
    for _ in range(20):
        points = np.unique(rng.uniform(0.05, 50.0, int(rng.integers(2, 40))))
        km = KernelMatrix.build(kernel, points)
        assert km.min_eigenvalue() >= -1e-10 * km.trace


def test_pair_correlation_below_product():
    kernel = LaguerreKernelN(1.0, 20)
    rng = np.random.default_rng(8)
    for x, y in rng.uniform(0.05, 80.0, (200, 2)):
        rho2 = correlation_fn(kernel, [x, y])
        product = kernel.diagonal(x) * kernel.diagonal(y)
        assert -1e-12 * product <= rho2 <= product * (1.0 + 1e-12)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
@pytest.mark.parametrize("x0", [0.5, 6.0, 30.0])
def test_palm_kernel_is_conditional_density_for_two_points(alpha, x0):
    # N = 2 on the hard-edge scale: the other particle has density y^alpha e^{-y/8} (y - x0)^2 / Z
    palm = PalmKernelN(LaguerreKernelN(alpha, 2), x0)
    y = np.linspace(0.05, 120.0, 200)
    z = math.gamma(alpha + 1.0) * 8.0 ** (alpha + 1.0) * (
        64.0 * (alpha + 2.0) * (alpha + 1.0) - 16.0 * x0 * (alpha + 1.0) + x0 * x0)
    expected = y ** alpha * np.exp(-y / 8.0) * (y - x0) ** 2 / z
    np.testing.assert_allclose(palm.diagonal(y), expected, rtol=1e-9, atol=1e-15)

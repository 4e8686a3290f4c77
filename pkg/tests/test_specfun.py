import math

import mpmath
import numpy as np
import pytest
from scipy import special

from specfun import (gamma_fn, log_gamma, gamma_sign, rgamma, log_binomial, bessel_j, x_switch, series_limit, laguerre,
                     laguerre_sum, laguerre_scaled, laguerre_monic, monic_norm, weight, log_weight,
                     laguerre_derivative_check, orthonormal_functions, SignedLog)
from utils.errors import DomainError


@pytest.mark.parametrize("z", [0.1, 0.5, 1.0, 2.5, 7.3, 20.0, 100.5, 170.0])
def test_gamma_against_mpmath(z):
    assert gamma_fn(z) == pytest.approx(float(mpmath.gamma(z)), rel=1e-12)


def test_gamma_small_integers():
    np.testing.assert_allclose(gamma_fn(np.arange(1.0, 11.0)), [math.factorial(k) for k in range(10)], rtol=1e-13)


def test_gamma_domain_and_overflow():
    with pytest.raises(DomainError):
        gamma_fn(0.0)
    with pytest.raises(DomainError):
        gamma_fn(-1.5)
    with pytest.raises(OverflowError):
        gamma_fn(200.0)


@pytest.mark.parametrize("z", [-3.5, -1.25, -0.5, 0.3, 4.0, 250.0, 1e4])
def test_log_gamma_matches_scipy(z):
    assert log_gamma(z) == pytest.approx(special.gammaln(z), rel=1e-12, abs=1e-12)


def test_log_gamma_poles():
    with pytest.raises(DomainError):
        log_gamma(-2.0)


def test_gamma_sign_alternates():
    np.testing.assert_array_equal(gamma_sign(np.array([2.0, -0.5, -1.5, -2.5, -3.0])), [1.0, -1.0, 1.0, -1.0, 0.0])


def test_rgamma_entire():
    np.testing.assert_allclose(rgamma(np.array([-2.0, -1.0, 0.0])), 0.0)
    np.testing.assert_allclose(rgamma(np.array([-0.5, 0.5, 3.0])), special.rgamma([-0.5, 0.5, 3.0]), rtol=1e-13)
    assert rgamma(171.0) == pytest.approx(float(mpmath.rgamma(171)), rel=1e-11)


def test_log_binomial():
    assert math.exp(log_binomial(10.0, 3.0)) == pytest.approx(120.0, rel=1e-12)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.0, 3.7])
def test_bessel_across_branches(nu):
    x = np.concatenate([np.linspace(0.0, 30.0, 301), [x_switch(nu), 50.0, 120.0]])
    np.testing.assert_allclose(bessel_j(nu, x), special.jv(nu, x), rtol=1e-9, atol=1e-8)


@pytest.mark.parametrize("nu", [0.0, 1.0, 3.7, 5.0, 10.0, 20.0, 50.0])
def test_bessel_absolute_error_up_to_1e4(nu):
    x = np.concatenate([np.linspace(0.0, 60.0, 601), np.linspace(60.0, 3000.0, 295), np.geomspace(3000.0, 1e4, 20),
                        [series_limit(nu), x_switch(nu), np.nextafter(x_switch(nu), 0.0)]])
    np.testing.assert_allclose(bessel_j(nu, x), special.jv(nu, x), rtol=0.0, atol=1e-10)


def test_bessel_recurrence_branch_near_turning_point():
    # J_nu peaks just past x = nu, inside the recurrence branch for large orders
    for nu in (20.0, 50.0):
        x = np.linspace(nu - 5.0, nu + 15.0, 41)
        assert np.all(x > series_limit(nu)) and np.all(x < x_switch(nu))
        expected = [float(mpmath.besselj(nu, v)) for v in x]
        np.testing.assert_allclose(bessel_j(nu, x), expected, rtol=1e-10, atol=1e-13)


def test_bessel_small_argument_mpmath():
    for nu in (0.0, 1.0, 2.5):
        assert bessel_j(nu, 1e-3) == pytest.approx(float(mpmath.besselj(nu, mpmath.mpf("1e-3"))), rel=1e-12)


@pytest.mark.parametrize("nu", [-0.5, -1.0, -1.5])
def test_bessel_negative_orders(nu):
    x = np.linspace(0.1, 20.0, 50)
    np.testing.assert_allclose(bessel_j(nu, x), special.jv(nu, x), rtol=1e-8, atol=1e-8)


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_j(1.0, -1.0)
    with pytest.raises(DomainError):
        bessel_j(-2.5, 1.0)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_laguerre_orthogonality_gauss_laguerre(alpha):
    x, w = special.roots_genlaguerre(40, alpha)
    for m in range(11):
        for n in range(11):
            value = np.sum(w * laguerre(m, alpha, x) * laguerre(n, alpha, x))
            expected = math.exp(log_gamma(n + alpha + 1.0) - log_gamma(n + 1.0)) if m == n else 0.0
            assert value == pytest.approx(expected, rel=1e-8, abs=1e-8 * (1.0 + abs(expected)))


@pytest.mark.parametrize("n", [0, 1, 2, 5, 12])
def test_recurrence_against_explicit_sum(n):
    x = np.linspace(0.0, 8.0, 33)
    np.testing.assert_allclose(laguerre(n, 1.5, x), laguerre_sum(n, 1.5, x), rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(laguerre(n, 1.5, x), special.eval_genlaguerre(n, 1.5, x), rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_recurrence_matches_explicit_sum_on_grid(alpha):
    x = np.linspace(0.25, 20.0, 80)
    for n in range(13):
        value = laguerre(n, alpha, x)
        assert np.all(np.abs(value - laguerre_sum(n, alpha, x)) <= 1e-9 * (1.0 + np.abs(value)))


def test_laguerre_at_origin():
    assert laguerre(20, 2.0, 0.0) == pytest.approx(math.comb(22, 20), rel=1e-12)


def test_laguerre_scaled_reconstructs():
    x = np.array([0.5, 3.0, 40.0])
    triple = laguerre_scaled(30, 1.0, x)
    np.testing.assert_allclose(triple.l_n * np.exp(triple.log_scale), laguerre(30, 1.0, x), rtol=1e-12)
    np.testing.assert_allclose(triple.l_nm1 * np.exp(triple.log_scale), laguerre(29, 1.0, x), rtol=1e-12)


def test_laguerre_scaled_stays_finite_for_large_degree():
    triple = laguerre_scaled(2000, 0.0, np.array([5000.0, 20000.0]))
    assert np.all(np.isfinite(triple.l_n)) and np.all(triple.log_scale > 0)


def test_monic_and_norm():
    x = 2.3
    assert laguerre_monic(4, 1.0, x) == pytest.approx(24.0 * laguerre(4, 1.0, x), rel=1e-12)
    assert monic_norm(3, 1.0) == pytest.approx(6.0 * 24.0, rel=1e-12)


def test_monic_falls_back_to_signed_log():
    value = laguerre_monic(300, 0.0, 1.0)
    assert isinstance(value, SignedLog)
    assert value.log_abs > 700.0


def test_weight():
    assert weight(1.0, 2.0) == pytest.approx(2.0 * math.exp(-2.0))
    assert log_weight(0.0, 0.0) == 0.0
    assert log_weight(1.0, 0.0) == -np.inf
    with pytest.raises(DomainError):
        weight(1.0, 0.0)


def test_derivative_identity():
    lhs, rhs = laguerre_derivative_check(6, 0.5, np.array([0.7, 2.0, 5.5]))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-6, atol=1e-6)


def test_orthonormal_functions_gram():
    alpha = 1.0
    x, w = special.roots_genlaguerre(60, alpha)
    phi = orthonormal_functions(12, alpha, x)
    # phi includes sqrt(w); remove the weight carried by the quadrature
    gram = (phi / np.exp(0.5 * (alpha * np.log(x) - x))[:, None]).T @ (
        w[:, None] * phi / np.exp(0.5 * (alpha * np.log(x) - x))[:, None])
    np.testing.assert_allclose(gram, np.eye(12), atol=1e-9)


def test_orthonormal_functions_large_argument():
    phi = orthonormal_functions(50, 0.0, np.array([1e4]))
    assert np.all(np.isfinite(phi))
    assert np.max(np.abs(phi)) < 1e-300 or np.all(phi == 0.0)


def test_order_validation():
    with pytest.raises(DomainError):
        laguerre(3, -1.0, 1.0)
    with pytest.raises(DomainError):
        laguerre(-1, 0.0, 1.0)

import numpy as np
import pytest

from hhgbox.specialfn import (
    LMAX,
    bessel_zero,
    bessel_zeros,
    gauss_legendre,
    spherical_bessel_j,
)


def j1_closed(x):
    """Elementary closed form j_1(x) = sin x / x^2 - cos x / x (test oracle)."""
    return np.sin(x) / x**2 - np.cos(x) / x


def bisect_root(f, lo, hi, iterations=200):
    """Plain bisection oracle; assumes a sign change on [lo, hi]."""
    flo = f(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if flo * fmid <= 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


class TestSphericalBessel:
    def test_j0_at_zero_limit(self):
        assert spherical_bessel_j(0, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_higher_l_at_zero_limit(self):
        for l in range(1, 11):
            assert spherical_bessel_j(l, 0.0) == 0.0

    def test_j0_at_pi(self):
        assert abs(spherical_bessel_j(0, np.pi)) < 1e-15

    def test_j1_vanishes_at_first_zero(self):
        # frozen value from the bisection oracle on (pi, 2*pi)
        assert abs(spherical_bessel_j(1, 4.493409457909064)) < 1e-10

    def test_j0_matches_elementary_form(self):
        xs = np.linspace(0.05, 1000.0, 777)
        expected = np.sin(xs) / xs
        got = spherical_bessel_j(0, xs)
        assert np.max(np.abs(got - expected) / np.maximum(np.abs(expected), 1e-3)) < 1e-12

    def test_j1_matches_elementary_form(self):
        xs = np.linspace(0.05, 1000.0, 777)
        expected = j1_closed(xs)
        got = spherical_bessel_j(1, xs)
        assert np.max(np.abs(got - expected) / np.maximum(np.abs(expected), 1e-3)) < 1e-12

    def test_relative_accuracy_against_mpmath(self):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 30
        rng = np.random.default_rng(7)
        for l in (0, 2, 5, 10):
            for x in rng.uniform(0.5, 1000.0, 12):
                ref = float(mpmath.sqrt(mpmath.pi / (2 * x)) * mpmath.besselj(l + 0.5, x))
                got = spherical_bessel_j(l, float(x))
                # relative where the value is not near a zero, absolute otherwise
                scale = max(abs(ref), 1e-4 / x)
                assert abs(got - ref) <= 1e-12 * scale

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            spherical_bessel_j(-1, 1.0)
        with pytest.raises(ValueError):
            spherical_bessel_j(LMAX + 1, 1.0)
        with pytest.raises(ValueError):
            spherical_bessel_j(0, -0.5)
        with pytest.raises(ValueError):
            spherical_bessel_j(0, np.inf)


class TestBesselZeros:
    def test_l0_zeros_are_multiples_of_pi(self):
        assert bessel_zero(0, 3) == pytest.approx(3 * np.pi, abs=1e-12)
        assert np.allclose(bessel_zeros(0, 10), np.arange(1, 11) * np.pi, atol=1e-12)

    def test_first_l1_zero_matches_bisection_oracle(self):
        oracle = bisect_root(j1_closed, np.pi, 2 * np.pi)
        assert bessel_zero(1, 1) == pytest.approx(oracle, abs=1e-12)
        assert bessel_zero(1, 1) == pytest.approx(4.493409457909064, abs=1e-10)

    def test_first_l2_zero_bracketed_by_interlacing(self):
        v = bessel_zero(2, 1)
        assert 4.49 < v < 2 * np.pi
        assert abs(spherical_bessel_j(2, v)) < 1e-11

    def test_zeros_increase_in_n(self):
        for l in (0, 1, 4, 9):
            z = bessel_zeros(l, 25)
            assert np.all(np.diff(z) > 0)

    def test_interlacing_in_l(self):
        # lambda_{n,l} < lambda_{n,l+1} < lambda_{n+1,l}
        for l in range(0, 10):
            z_l = bessel_zeros(l, 21)
            z_l1 = bessel_zeros(l + 1, 20)
            assert np.all(z_l[:-1] < z_l1)
            assert np.all(z_l1 < z_l[1:])

    def test_residuals_small_everywhere(self):
        for l in range(0, 11):
            z = bessel_zeros(l, 20)
            assert np.max(np.abs(spherical_bessel_j(l, z))) <= 1e-11

    def test_range_checks(self):
        with pytest.raises(ValueError):
            bessel_zero(0, 0)
        with pytest.raises(ValueError):
            bessel_zeros(-1, 5)
        with pytest.raises(ValueError):
            bessel_zeros(LMAX + 1, 5)


class TestGaussLegendre:
    def test_order_one_is_midpoint(self):
        rule = gauss_legendre(1)
        assert rule.nodes[0] == pytest.approx(0.5, abs=1e-15)
        assert rule.weights[0] == pytest.approx(1.0, abs=1e-15)

    def test_weights_sum_to_interval_length(self):
        for order in (1, 2, 8, 64, 200):
            rule = gauss_legendre(order)
            assert abs(rule.weights.sum() - 1.0) < 1e-14
            assert np.all(rule.weights > 0)
            assert np.all((rule.nodes > 0) & (rule.nodes < 1))

    def test_polynomial_exactness(self):
        # degree 2*order - 1 integrates exactly
        for order in (2, 5, 11):
            rule = gauss_legendre(order)
            for deg in range(2 * order):
                exact = 1.0 / (deg + 1)
                assert rule.integrate(lambda y, d=deg: y**d) == pytest.approx(exact, abs=1e-12)

    def test_y_squared_with_order_two(self):
        assert gauss_legendre(2).integrate(lambda y: y**2) == pytest.approx(1 / 3, abs=1e-15)

    def test_sin_squared_analytic_value(self):
        rule = gauss_legendre(20)
        assert rule.integrate(lambda y: np.sin(np.pi * y) ** 2) == pytest.approx(0.5, abs=1e-12)

    def test_convergence_on_smooth_integrand(self):
        f = lambda y: np.exp(-3 * y) * np.cos(7 * y)
        v64 = gauss_legendre(64).integrate(f)
        v128 = gauss_legendre(128).integrate(f)
        assert abs(v64 - v128) < 1e-12

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            gauss_legendre(0)

"""Tests for single-tier downlink coverage."""
import math

import numpy as np
import pytest

from sgcov.core.errors import ParameterError
from sgcov.core.numerics import integrate, rho, zeta_alpha
from sgcov.core.rng import make_rng
from sgcov.engine.downlink import (
    DownlinkModel,
    coverage_alpha4_snr,
    coverage_general,
    coverage_interflimited,
    effective_density,
    laplace_interference,
    lognormal_fractional_moment,
    mean_interference_annulus,
    shadowing_equivalent_density,
)
from sgcov.models import DownlinkParams, GridSpec, ShadowingSpec

GRID_DB = np.arange(-10.0, 21.0)


class TestMeanInterference:
    def test_unbounded_annulus(self):
        assert mean_interference_annulus(1.0, 1.0, 4.0, 1.0) == pytest.approx(math.pi)

    def test_empty_annulus(self):
        assert mean_interference_annulus(1.0, 1.0, 4.0, 2.0, 2.0) == 0.0

    def test_logarithmic_limit(self):
        near_two = mean_interference_annulus(1.0, 1.0, 2.01, 1.0, 2.0)
        assert near_two == pytest.approx(2.0 * math.pi * math.log(2.0), rel=0.01)
        assert mean_interference_annulus(1.0, 1.0, 2.0, 1.0, 2.0) == pytest.approx(
            2.0 * math.pi * math.log(2.0)
        )

    def test_divergent_cases(self):
        with pytest.raises(ParameterError):
            mean_interference_annulus(1.0, 1.0, 4.0, 0.0)
        with pytest.raises(ParameterError):
            mean_interference_annulus(1.0, 1.0, 2.0, 1.0)


class TestLaplace:
    def test_zero_argument(self):
        assert laplace_interference(0.0, 1.0, 1.0, 4.0) == 1.0

    def test_unfaded_closed_form(self):
        value = laplace_interference(1.0, 1.0, 1.0, 4.0, fading="none")
        assert value == pytest.approx(math.exp(-math.pi * math.sqrt(math.pi)), rel=1e-12)
        assert value == pytest.approx(3.82e-3, abs=1e-5)

    @pytest.mark.parametrize("alpha", [3.0, 4.0, 5.0])
    def test_rayleigh_without_exclusion(self, alpha):
        s, density, power = 0.7, 0.4, 2.0
        expected = math.exp(-density * zeta_alpha(alpha) * (s * power) ** (2.0 / alpha))
        assert laplace_interference(s, density, power, alpha) == pytest.approx(expected, rel=1e-8)

    @pytest.mark.parametrize("alpha", [3.0, 4.0])
    def test_rayleigh_with_exclusion(self, alpha):
        s, density, power, r_excl = 2.0, 0.5, 1.0, 0.8
        exponent, _ = integrate(lambda x: x / (1.0 + x**alpha / (s * power)), r_excl)
        expected = math.exp(-2.0 * math.pi * density * exponent)
        value = laplace_interference(s, density, power, alpha, r_excl=r_excl)
        assert value == pytest.approx(expected, rel=1e-8)

    def test_unfaded_with_exclusion(self):
        s, density, alpha, r_excl = 1.0, 1.0, 4.0, 0.5
        exponent, _ = integrate(lambda x: -math.expm1(-s * x**-alpha) * x, r_excl)
        expected = math.exp(-2.0 * math.pi * density * exponent)
        value = laplace_interference(s, density, 1.0, alpha, r_excl=r_excl, fading="none")
        assert value == pytest.approx(expected, rel=1e-7)

    def test_decreasing_in_s(self):
        values = [laplace_interference(s, 1.0, 1.0, 3.5) for s in (0.01, 0.1, 1.0, 10.0)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_unknown_fading(self):
        with pytest.raises(ParameterError):
            laplace_interference(1.0, 1.0, 1.0, 4.0, fading="nakagami")


class TestShadowing:
    def test_lognormal_moment(self):
        assert lognormal_fractional_moment(4.0, 8.0) == pytest.approx(1.5285, abs=1e-4)
        assert lognormal_fractional_moment(4.0, 0.0) == 1.0

    def test_lognormal_moment_by_sampling(self):
        gains = 10.0 ** (8.0 * make_rng(21).standard_normal(1_000_000) / 10.0)
        assert np.mean(gains**0.5) == pytest.approx(lognormal_fractional_moment(4.0, 8.0), rel=0.01)

    def test_equivalent_density(self):
        assert shadowing_equivalent_density(3.0, 4.0, None) == 3.0
        assert shadowing_equivalent_density(3.0, 4.0, 1.0) == 3.0
        spec = ShadowingSpec(kind="lognormal", sigma_db=8.0)
        single = shadowing_equivalent_density(1.0, 4.0, spec)
        assert shadowing_equivalent_density(2.0, 4.0, spec) == pytest.approx(2.0 * single)
        generic = ShadowingSpec(kind="generic", fractional_moment=1.2)
        assert shadowing_equivalent_density(2.0, 3.0, generic) == pytest.approx(2.4)

    def test_rejects_infinite_moment(self):
        with pytest.raises(ParameterError):
            shadowing_equivalent_density(1.0, 4.0, math.inf)

    def test_shadowed_curve_equals_denser_unshadowed_curve(self):
        shadowing = ShadowingSpec(kind="lognormal", sigma_db=8.0)
        shadowed = DownlinkParams(density=1.0, sigma2=0.1, shadowing=shadowing)
        plain = DownlinkParams(density=effective_density(shadowed), sigma2=0.1)
        grid = GridSpec(start_db=-5.0, step_db=5.0, stop_db=15.0)
        a = DownlinkModel().curve(shadowed, grid)
        b = DownlinkModel().curve(plain, grid)
        np.testing.assert_allclose(a.coverage, b.coverage, rtol=1e-12)
        assert a.details["effective_density"] == pytest.approx(1.5285, abs=1e-4)


class TestInterferenceLimited:
    def test_fully_loaded_value(self):
        value = coverage_interflimited(1.0, 4.0)
        assert value == pytest.approx(1.0 / (1.0 + math.pi / 4.0), abs=1e-12)
        assert value == pytest.approx(0.560099, abs=1e-6)

    def test_low_threshold(self):
        assert coverage_interflimited(0.25, 4.0) == pytest.approx(0.8113, abs=1e-4)
        assert coverage_interflimited(1e-6, 4.0) >= 0.999

    def test_high_threshold(self):
        assert coverage_interflimited(1e6, 4.0) <= 1e-3

    @pytest.mark.parametrize("alpha", [2.5, 3.0, 3.5, 4.0, 5.0])
    def test_general_without_noise(self, alpha):
        params = DownlinkParams(density=0.3, power=5.0, alpha=alpha)
        for tau in (0.1, 1.0, 10.0):
            assert coverage_general(tau, params) == pytest.approx(
                coverage_interflimited(tau, alpha), rel=1e-8
            )


class TestWithNoise:
    def test_general_matches_alpha4_form_on_grid(self):
        params = DownlinkParams(density=1.0, alpha=4.0, sigma2=0.1)
        for tau in 10.0 ** (GRID_DB / 10.0):
            general = coverage_general(tau, params)
            closed = coverage_alpha4_snr(tau, 1.0, 10.0)
            assert abs(general - closed) <= 1e-6

    def test_high_snr_tends_to_interference_limited(self):
        for tau in 10.0 ** (GRID_DB / 10.0):
            expected = 1.0 / (1.0 + rho(tau, 4.0))
            assert abs(coverage_alpha4_snr(tau, 1.0, 1e12) - expected) <= 1e-4
            params = DownlinkParams(density=1.0, alpha=4.0, sigma2=1e-12)
            assert abs(coverage_general(tau, params) - expected) <= 1e-4

    def test_noise_kernel_matches_quadrature(self):
        density, tau, snr, alpha = 0.5, 2.0, 10.0, 3.0
        params = DownlinkParams(density=density, alpha=alpha, sigma2=1.0 / snr)
        r = rho(tau, alpha)

        def integrand(x):
            return math.exp(-math.pi * density * x * (1.0 + r) - tau / snr * x ** (alpha / 2.0))

        value, _ = integrate(integrand, 0.0)
        assert coverage_general(tau, params) == pytest.approx(math.pi * density * value, rel=1e-7)

    def test_increases_with_snr(self):
        values = [coverage_alpha4_snr(1.0, 1.0, snr) for snr in (0.1, 1.0, 10.0, 100.0)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_low_threshold(self):
        params = DownlinkParams(density=1.0, alpha=3.5, sigma2=0.1)
        assert coverage_general(1e-6, params) >= 0.999


def test_curve_is_non_increasing():
    params = DownlinkParams(density=1.0, alpha=3.0, sigma2=0.05)
    curve = DownlinkModel().curve(params, GridSpec())
    assert len(curve) == 31
    assert np.all(np.diff(curve.coverage) <= 0)
    assert np.all((curve.coverage >= 0) & (curve.coverage <= 1))

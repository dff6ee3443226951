"""Tests for PPP sampling, transforms and the empirical functionals."""
import math

import numpy as np
import pytest
from scipy import stats

from sgcov.core.errors import ParameterError
from sgcov.core.numerics import integrate
from sgcov.core.point_process import (
    Displacement,
    PointSample,
    Superposition,
    Thinning,
    Window,
    campbell_sum,
    count_points,
    nearest_distance_cdf,
    nearest_distance_pdf,
    nearest_neighbor_distances,
    pgfl_product,
    sample_ppp,
    transform,
    void_probability,
    voronoi_assign,
)
from sgcov.core.rng import make_rng, trial_rng
from sgcov.engine.downlink import lognormal_fractional_moment, mean_interference_annulus


def _counts(intensity, window, draws, seed):
    rng = make_rng(seed)
    return np.array([len(sample_ppp(intensity, window, rng)) for _ in range(draws)])


class TestWindow:
    def test_areas(self):
        assert Window.disk(2.0).area == pytest.approx(4.0 * math.pi)
        assert Window.annulus(1.0, 2.0).area == pytest.approx(3.0 * math.pi)

    def test_invalid(self):
        with pytest.raises(ParameterError):
            Window.disk(0.0)
        with pytest.raises(ParameterError):
            Window.annulus(2.0, 1.0)
        with pytest.raises(ParameterError):
            Window("disk", 2.0, 1.0)

    def test_contains(self):
        window = Window.annulus(1.0, 2.0, center=(5.0, 0.0))
        mask = window.contains(np.array([[5.0, 0.0], [6.5, 0.0], [8.0, 0.0]]))
        assert mask.tolist() == [False, True, False]


class TestSampling:
    def test_deterministic_given_seed(self):
        window = Window.disk(5.0)
        a = sample_ppp(1.0, window, seed=3)
        b = sample_ppp(1.0, window, seed=3)
        np.testing.assert_array_equal(a.points, b.points)

    def test_points_inside_window(self):
        window = Window.annulus(2.0, 3.0, center=(1.0, -1.0))
        sample = sample_ppp(5.0, window, seed=1)
        assert len(sample) > 0
        assert np.all(window.contains(sample.points))

    def test_sample_is_read_only(self):
        sample = sample_ppp(1.0, Window.disk(3.0), seed=2)
        with pytest.raises(ValueError):
            sample.points[0, 0] = 0.0

    def test_count_mean_and_variance(self):
        counts = _counts(2.0, Window.disk(1.0), 20_000, seed=5)
        mean = 2.0 * math.pi
        standard_error = math.sqrt(mean / len(counts))
        assert abs(counts.mean() - mean) < 4 * standard_error
        assert counts.var(ddof=1) == pytest.approx(mean, rel=0.05)

    def test_count_distribution_is_poisson(self):
        counts = _counts(1.0, Window.disk(1.0), 20_000, seed=6)
        mean = math.pi
        for n in range(5):
            expected = math.exp(-mean) * mean**n / math.factorial(n)
            freq = np.mean(counts == n)
            assert abs(freq - expected) < 4 * math.sqrt(expected * (1 - expected) / len(counts))

    def test_tiny_window_is_usually_empty(self):
        counts = _counts(1.0, Window.disk(1e-4), 1_000, seed=7)
        assert np.all(counts == 0)

    def test_disjoint_regions_uncorrelated(self):
        rng = make_rng(8)
        inner, ring = Window.disk(1.0), Window.annulus(1.0, 2.0)
        pairs = []
        for _ in range(5_000):
            sample = sample_ppp(1.0, Window.disk(2.0), rng)
            pairs.append((count_points(sample, inner), count_points(sample, ring)))
        a, b = np.array(pairs, dtype=float).T
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.06

    def test_rejects_non_positive_intensity(self):
        with pytest.raises(ParameterError):
            sample_ppp(0.0, Window.disk(1.0))


class TestDistances:
    def test_void_probability(self):
        assert void_probability(1.0, 0.0) == 1.0
        assert void_probability(1.0 / math.pi, 1.0) == pytest.approx(math.exp(-1.0))
        with pytest.raises(ParameterError):
            void_probability(1.0, -1.0)

    def test_empirical_void_frequency(self):
        counts = _counts(1.0 / math.pi, Window.disk(1.0), 20_000, seed=9)
        p = math.exp(-1.0)
        assert abs(np.mean(counts == 0) - p) < 4 * math.sqrt(p * (1 - p) / len(counts))

    def test_pdf_normalised_with_mode(self):
        assert nearest_distance_pdf(2.0, 0.0) == 0.0
        value, _ = integrate(lambda r: nearest_distance_pdf(2.0, r), 0.0)
        assert value == pytest.approx(1.0, rel=1e-8)
        mode = 1.0 / math.sqrt(2.0 * math.pi * 2.0)
        peak = nearest_distance_pdf(2.0, mode)
        assert peak > nearest_distance_pdf(2.0, 0.99 * mode)
        assert peak > nearest_distance_pdf(2.0, 1.01 * mode)

    def test_pdf_rejects_negative_distance(self):
        with pytest.raises(ParameterError):
            nearest_distance_pdf(1.0, -0.5)

    def test_empirical_nearest_neighbour_cdf(self):
        sample = sample_ppp(1.0, Window.disk(100.0), seed=10)
        distances = nearest_neighbor_distances(sample)
        interior = distances[sample.radii < 95.0]
        result = stats.kstest(interior, lambda r: nearest_distance_cdf(1.0, r))
        assert result.statistic <= 0.015


class TestTransforms:
    def test_thinning_identity(self):
        sample = sample_ppp(1.0, Window.disk(3.0), seed=11)
        assert transform(sample, Thinning(1.0), seed=1) is sample

    def test_thinning_counts(self):
        window = Window.disk(5.0)
        rng = make_rng(12)
        counts = []
        for _ in range(2_000):
            thinned = transform(sample_ppp(4.0, window, rng), Thinning(0.5), rng)
            counts.append(len(thinned))
        assert thinned.intensity_used == 2.0
        mean = 2.0 * window.area
        assert abs(np.mean(counts) - mean) < 4 * math.sqrt(mean / len(counts))

    def test_thinning_rejects_bad_probability(self):
        sample = sample_ppp(1.0, Window.disk(1.0), seed=1)
        with pytest.raises(ParameterError):
            transform(sample, Thinning(1.5))

    def test_superposition(self):
        window = Window.disk(5.0)
        rng = make_rng(13)
        counts = []
        for _ in range(2_000):
            a = sample_ppp(1.0, window, rng)
            b = sample_ppp(2.5, window, rng)
            merged = transform(a, Superposition(b))
            counts.append(len(merged))
        assert merged.intensity_used == 3.5
        mean = 3.5 * window.area
        assert abs(np.mean(counts) - mean) < 4 * math.sqrt(mean / len(counts))
        assert np.var(counts, ddof=1) == pytest.approx(mean, rel=0.15)

    def test_superposition_needs_shared_window(self):
        a = sample_ppp(1.0, Window.disk(2.0), seed=1)
        b = sample_ppp(1.0, Window.disk(3.0), seed=2)
        with pytest.raises(ParameterError):
            transform(a, Superposition(b))

    def test_superposition_keeps_common_marks(self):
        window = Window.disk(4.0)
        a = sample_ppp(1.0, window, seed=1)
        b = sample_ppp(1.0, window, seed=2)
        a = a.with_marks(power=np.ones(len(a)), tier=np.zeros(len(a)))
        b = b.with_marks(power=np.full(len(b), 2.0))
        merged = transform(a, Superposition(b))
        assert set(merged.marks) == {"power"}
        assert len(merged.marks["power"]) == len(merged)

    def test_unit_displacement_is_identity(self):
        sample = sample_ppp(1.0, Window.disk(3.0), seed=14)
        moved = transform(sample, Displacement(alpha=4.0, gains=np.ones(len(sample))))
        np.testing.assert_allclose(moved.points, sample.points)
        assert moved.intensity_used == sample.intensity_used

    def test_displacement_by_shadowing_scales_intensity(self):
        sigma_db = 8.0
        moment = lognormal_fractional_moment(4.0, sigma_db)
        window, inner = Window.disk(20.0), Window.disk(5.0)
        spec = Displacement(
            alpha=4.0,
            law=lambda rng, n: 10.0 ** (sigma_db * rng.standard_normal(n) / 10.0),
            fractional_moment=moment,
        )
        rng = make_rng(15)
        counts = [
            count_points(transform(sample_ppp(1.0, window, rng), spec, rng), inner)
            for _ in range(500)
        ]
        assert np.mean(counts) == pytest.approx(moment * inner.area, rel=0.03)

    def test_displacement_needs_gains(self):
        sample = sample_ppp(1.0, Window.disk(2.0), seed=1)
        with pytest.raises(ParameterError):
            transform(sample, Displacement(alpha=4.0))


class TestFunctionals:
    def test_campbell_trivial_cases(self):
        window = Window.disk(2.0)
        empty = PointSample(np.empty((0, 2)), window, 1.0)
        assert campbell_sum(empty, lambda x: np.ones(len(x))) == 0.0
        sample = sample_ppp(3.0, window, seed=1)
        assert campbell_sum(sample, lambda x: 1.0) == len(sample)

    def test_campbell_mean_interference(self):
        outer = 15.0
        window = Window.annulus(1.0, outer)
        expected = mean_interference_annulus(1.0, 1.0, 4.0, 1.0, outer)
        assert expected == pytest.approx(math.pi * (1.0 - outer**-2))

        def path_loss(x):
            return np.hypot(x[:, 0], x[:, 1]) ** -4.0

        values = [campbell_sum(sample_ppp(1.0, window, trial_rng(16, t)), path_loss) for t in range(10_000)]
        assert np.mean(values) == pytest.approx(expected, rel=0.02)

    def test_campbell_rejects_non_finite(self):
        window = Window.disk(2.0)
        sample = PointSample(np.array([[0.0, 0.0]]), window, 1.0)
        with pytest.raises(ParameterError):
            campbell_sum(sample, lambda x: np.hypot(x[:, 0], x[:, 1]) ** -4.0)

    def test_pgfl_of_constant_one(self):
        sample = sample_ppp(2.0, Window.disk(2.0), seed=1)
        assert pgfl_product(sample, lambda x: 1.0) == 1.0

    def test_pgfl_matches_laplace_closed_form(self):
        s = 0.01
        window = Window.disk(15.0)

        def f(x):
            return np.exp(-s * np.hypot(x[:, 0], x[:, 1]) ** -4.0)

        values = [
            pgfl_product(sample_ppp(1.0, window, trial_rng(17, t)), f, strict=False)
            for t in range(20_000)
        ]
        assert np.mean(values) == pytest.approx(math.exp(-math.pi * math.sqrt(math.pi * s)), rel=0.02)

    def test_pgfl_strict_range(self):
        sample = PointSample(np.array([[1.0, 1.0]]), Window.disk(2.0), 1.0)
        with pytest.raises(ParameterError):
            pgfl_product(sample, lambda x: np.full(len(x), 2.0))
        assert pgfl_product(sample, lambda x: np.full(len(x), 2.0), strict=False) == 2.0

    def test_pgfl_of_two_realization_process(self, two_realization_process):
        def squared_norm(x):
            return x[:, 0] ** 2 + x[:, 1] ** 2

        mean = sum(p * pgfl_product(s, squared_norm, strict=False) for p, s in two_realization_process)
        assert mean == pytest.approx(0.25)

    def test_expectation_measure_of_two_realization_process(self, two_realization_process):
        unit = Window.disk(1.0)
        mean = sum(p * count_points(s, unit) for p, s in two_realization_process)
        assert mean == pytest.approx(0.25 * 2 + 0.75 * 1)


class TestVoronoi:
    def test_single_site(self):
        points = np.array([[1.0, 0.0], [-3.0, 4.0]])
        assignment = voronoi_assign(points, [[0.0, 0.0]])
        assert assignment.site_index.tolist() == [0, 0]
        np.testing.assert_allclose(assignment.distance, [1.0, 5.0])

    def test_tie_goes_to_lowest_index(self):
        sites = [[1.0, 0.0], [-1.0, 0.0], [0.0, 5.0]]
        assignment = voronoi_assign([[0.0, 0.0]], sites)
        assert assignment.site_index[0] == 0
        assert assignment.distance[0] == 1.0

    def test_matches_brute_force(self):
        rng = make_rng(18)
        sites = rng.uniform(-5, 5, size=(40, 2))
        points = rng.uniform(-5, 5, size=(500, 2))
        assignment = voronoi_assign(points, sites)
        d = np.hypot(points[:, None, 0] - sites[None, :, 0], points[:, None, 1] - sites[None, :, 1])
        np.testing.assert_array_equal(assignment.site_index, d.argmin(axis=1))
        np.testing.assert_allclose(assignment.distance, d.min(axis=1))

    def test_empty_inputs(self):
        with pytest.raises(ParameterError):
            voronoi_assign([[0.0, 0.0]], np.empty((0, 2)))
        assert len(voronoi_assign(np.empty((0, 2)), [[0.0, 0.0]]).site_index) == 0

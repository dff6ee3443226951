"""Homogeneous Poisson point processes on disks and annuli.

Sampling, the three PPP-preserving transforms (thinning, superposition,
displacement) and the empirical functionals used as statistical oracles:
counting, Campbell sums, PGFL products and nearest-site assignment.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Literal, Mapping

import numpy as np
from scipy.spatial import cKDTree

from sgcov.core.errors import ParameterError, require
from sgcov.core.rng import SeedLike, make_rng

logger = logging.getLogger(__name__)

PointFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Window:
    """Disk or annulus observation window."""

    shape: Literal["disk", "annulus"]
    outer_radius: float
    inner_radius: float = 0.0
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        require(self.shape in ("disk", "annulus"), f"unknown window shape {self.shape!r}", "shape")
        require(
            np.isfinite(self.outer_radius) and self.outer_radius > 0,
            "outer radius must be finite and positive",
            "outer_radius",
        )
        require(self.inner_radius >= 0, "inner radius must be non-negative", "inner_radius")
        require(
            self.inner_radius < self.outer_radius,
            "inner radius must be smaller than outer radius",
            "inner_radius",
        )
        if self.shape == "disk":
            require(self.inner_radius == 0, "a disk has no inner radius", "inner_radius")

    @classmethod
    def disk(cls, radius: float, center: tuple[float, float] = (0.0, 0.0)) -> "Window":
        return cls("disk", float(radius), 0.0, center)

    @classmethod
    def annulus(
        cls, inner: float, outer: float, center: tuple[float, float] = (0.0, 0.0)
    ) -> "Window":
        return cls("annulus", float(outer), float(inner), center)

    @property
    def area(self) -> float:
        return np.pi * (self.outer_radius**2 - self.inner_radius**2)

    def distances(self, points: np.ndarray) -> np.ndarray:
        return np.hypot(points[:, 0] - self.center[0], points[:, 1] - self.center[1])

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of the points lying in the (closed) window.

        Boundaries carry a relative slack of 1e-12 to absorb polar/Cartesian
        rounding.
        """
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        d = self.distances(points)
        slack = 1e-12 * self.outer_radius
        return (d >= self.inner_radius - slack) & (d <= self.outer_radius + slack)


@dataclass(frozen=True)
class PointSample:
    """One realization of a point process inside a window, with optional marks."""

    points: np.ndarray
    window: Window
    intensity_used: float
    marks: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        frozen_marks = {}
        for name, values in self.marks.items():
            values = np.asarray(values, dtype=float)
            require(
                values.shape == (len(pts),),
                f"mark {name!r} has {values.size} values for {len(pts)} points",
                "marks",
            )
            values.setflags(write=False)
            frozen_marks[name] = values
        object.__setattr__(self, "marks", frozen_marks)
        require(bool(np.all(self.window.contains(pts))), "sample has points outside its window")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def radii(self) -> np.ndarray:
        """Distances of the points from the window center."""
        return self.window.distances(self.points)

    def with_marks(self, **marks: np.ndarray) -> "PointSample":
        merged = dict(self.marks)
        merged.update(marks)
        return PointSample(self.points, self.window, self.intensity_used, merged)

    def subset(self, mask: np.ndarray, intensity: float) -> "PointSample":
        marks = {name: values[mask] for name, values in self.marks.items()}
        return PointSample(self.points[mask], self.window, intensity, marks)


@dataclass(frozen=True)
class Assignment:
    """Nearest-site assignment of a set of points."""

    site_index: np.ndarray
    distance: np.ndarray


# -- transform specs ---------------------------------------------------------


@dataclass(frozen=True)
class Thinning:
    """Keep each point independently with probability ``q``."""

    q: float


@dataclass(frozen=True)
class Superposition:
    """Union with an independent sample on the same window."""

    other: PointSample


@dataclass(frozen=True)
class Displacement:
    """Radial scaling x -> x * chi**(-1/alpha) by i.i.d. gains chi.

    Gains are given either explicitly (one per point) or as a law
    ``law(rng, n)``. ``fractional_moment`` is E[chi^(2/alpha)] when known.
    """

    alpha: float
    gains: np.ndarray | None = None
    law: Callable[[np.random.Generator, int], np.ndarray] | None = None
    fractional_moment: float | None = None


TransformSpec = Thinning | Superposition | Displacement


# -- sampling ----------------------------------------------------------------


def sample_ppp(intensity: float, window: Window, seed: SeedLike = None) -> PointSample:
    """Sample a homogeneous PPP of the given intensity on ``window``.

    The count is Poisson(intensity * area) and, given the count, points are
    i.i.d. uniform on the window.
    """
    require(np.isfinite(intensity) and intensity > 0, "intensity must be positive", "intensity")
    rng = make_rng(seed)
    n = rng.poisson(intensity * window.area)
    r = np.sqrt(rng.uniform(window.inner_radius**2, window.outer_radius**2, size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    r = np.clip(r, window.inner_radius, window.outer_radius)
    points = np.column_stack(
        (window.center[0] + r * np.cos(theta), window.center[1] + r * np.sin(theta))
    )
    return PointSample(points, window, float(intensity))


def void_probability(intensity: float, radius: float) -> float:
    """P[no point within ``radius``] = exp(-lambda pi r^2)."""
    require(intensity > 0, "intensity must be positive", "intensity")
    require(radius >= 0, "radius must be non-negative", "radius")
    return float(np.exp(-intensity * np.pi * radius**2))


def nearest_distance_pdf(intensity: float, r):
    """Density of the distance to the nearest point, 2 pi lambda r exp(-lambda pi r^2)."""
    require(intensity > 0, "intensity must be positive", "intensity")
    r = np.asarray(r, dtype=float)
    require(bool(np.all(r >= 0)), "distance must be non-negative", "r")
    value = 2.0 * np.pi * intensity * r * np.exp(-intensity * np.pi * r**2)
    return float(value) if value.ndim == 0 else value


def nearest_distance_cdf(intensity: float, r):
    """CDF of the nearest-point distance, 1 - exp(-lambda pi r^2)."""
    require(intensity > 0, "intensity must be positive", "intensity")
    r = np.asarray(r, dtype=float)
    require(bool(np.all(r >= 0)), "distance must be non-negative", "r")
    value = -np.expm1(-intensity * np.pi * r**2)
    return float(value) if value.ndim == 0 else value


# -- transforms --------------------------------------------------------------


def transform(sample: PointSample, spec: TransformSpec, seed: SeedLike = None) -> PointSample:
    """Apply a PPP-preserving transform.

    Displacement is relative to the window center; displaced points that leave
    the window are dropped, so the result is the displaced process restricted
    to the same window.
    """
    if isinstance(spec, Thinning):
        require(0.0 <= spec.q <= 1.0, "thinning probability must lie in [0, 1]", "q")
        if spec.q == 1.0:
            return sample
        keep = make_rng(seed).uniform(size=len(sample)) < spec.q
        return sample.subset(keep, spec.q * sample.intensity_used)

    if isinstance(spec, Superposition):
        other = spec.other
        if other.window != sample.window:
            raise ParameterError("superposed samples must share a window", field="other")
        common = sample.marks.keys() & other.marks.keys()
        marks = {k: np.concatenate((sample.marks[k], other.marks[k])) for k in common}
        return PointSample(
            np.vstack((sample.points, other.points)),
            sample.window,
            sample.intensity_used + other.intensity_used,
            marks,
        )

    if isinstance(spec, Displacement):
        require(spec.alpha > 0, "alpha must be positive", "alpha")
        if spec.gains is not None:
            gains = np.asarray(spec.gains, dtype=float)
            require(gains.shape == (len(sample),), "one gain per point is required", "gains")
        elif spec.law is not None:
            gains = np.asarray(spec.law(make_rng(seed), len(sample)), dtype=float)
        else:
            raise ParameterError("displacement needs gains or a law", field="gains")
        require(bool(np.all(gains > 0)), "displacement gains must be positive", "gains")
        center = np.asarray(sample.window.center)
        moved = center + (sample.points - center) * gains[:, None] ** (-1.0 / spec.alpha)
        require(bool(np.all(np.isfinite(moved))), "displacement produced non-finite coordinates")
        moment = spec.fractional_moment
        if moment is None:
            moment = float(np.mean(gains ** (2.0 / spec.alpha))) if len(gains) else 1.0
        keep = sample.window.contains(moved)
        marks = {name: values[keep] for name, values in sample.marks.items()}
        return PointSample(moved[keep], sample.window, sample.intensity_used * moment, marks)

    raise ParameterError(f"unsupported transform {type(spec).__name__}", field="spec")


# -- empirical functionals ---------------------------------------------------


def count_points(sample: PointSample, window: Window) -> int:
    """Counting measure of ``window`` under the sample."""
    return int(np.count_nonzero(window.contains(sample.points)))


def _evaluate(sample: PointSample, f: PointFunction) -> np.ndarray:
    values = np.asarray(f(sample.points), dtype=float)
    if values.ndim == 0:
        values = np.full(len(sample), float(values))
    if not np.all(np.isfinite(values)):
        raise ParameterError("function is not finite on every sample point", field="f")
    return values


def campbell_sum(sample: PointSample, f: PointFunction) -> float:
    """Sum of ``f`` over the points; its mean is lambda * integral of f."""
    if len(sample) == 0:
        return 0.0
    return float(np.sum(_evaluate(sample, f)))


def pgfl_product(sample: PointSample, f: PointFunction, strict: bool = True) -> float:
    """Product of ``f`` over the points; its mean is the PGFL.

    With ``strict`` the values must lie in (0, 1], the range for which the
    Poisson closed form exp(-lambda * integral(1 - f)) applies. Without it any
    non-negative ``f`` is accepted.
    """
    if len(sample) == 0:
        return 1.0
    values = _evaluate(sample, f)
    if strict:
        if np.any(values <= 0) or np.any(values > 1):
            raise ParameterError("PGFL function values must lie in (0, 1]", field="f")
    elif np.any(values < 0):
        raise ParameterError("PGFL function values must be non-negative", field="f")
    return float(np.prod(values))


def voronoi_assign(points, sites) -> Assignment:
    """Assign every point to its nearest site; ties go to the lowest index."""
    sites = np.asarray(sites, dtype=float).reshape(-1, 2)
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(sites) == 0:
        raise ParameterError("site list is empty", field="sites")
    if len(points) == 0:
        return Assignment(np.empty(0, dtype=np.intp), np.empty(0))
    if len(sites) == 1:
        return Assignment(
            np.zeros(len(points), dtype=np.intp),
            np.hypot(points[:, 0] - sites[0, 0], points[:, 1] - sites[0, 1]),
        )

    k = min(len(sites), 4)
    dist, idx = cKDTree(sites).query(points, k=k)
    site_index = idx[:, 0].copy()
    distance = dist[:, 0].copy()
    tied = dist[:, 1] == dist[:, 0]
    for row in np.flatnonzero(tied):
        exact = np.hypot(sites[:, 0] - points[row, 0], sites[:, 1] - points[row, 1])
        nearest = np.flatnonzero(exact == exact.min())
        site_index[row] = nearest[0]
        distance[row] = exact[nearest[0]]
    return Assignment(site_index, distance)


def nearest_neighbor_distances(sample: PointSample) -> np.ndarray:
    """Distance from each point to its nearest other point of the sample."""
    require(len(sample) >= 2, "at least two points are required")
    dist, _ = cKDTree(sample.points).query(sample.points, k=2)
    return dist[:, 1]

"""Uplink coverage with fractional power control.

Each interfering user transmits p * R^(alpha * epsilon), where R is its own
link distance. Interferers form a PPP of intensity lambda * (1 - e^(-pi lambda d^2))
around the tagged BS and their link distances are truncated Rayleigh.

Distances are normalised by sqrt(pi * lambda), which removes the density from
the interference term. The Laplace exponent then depends only on

    c = 1 / (s * p * (pi * lambda)^(alpha (1 - epsilon) / 2))

and, after swapping the order of the two integrals, collapses to one integral
over the squared link distance with a closed-form tail inside.
"""
import logging
import math

from sgcov.core.errors import QuadratureError, require
from sgcov.core.numerics import integrate, rho, tail_integral_hyp
from sgcov.engine.base import CoverageCurve, CoverageModel
from sgcov.models.run_config import GridSpec, QuadratureSpec
from sgcov.models.scenario import UplinkParams

logger = logging.getLogger(__name__)

DEFAULT_SPEC = QuadratureSpec()


def interferer_intensity(d: float, density: float) -> float:
    """Intensity of active interferers at distance ``d`` from the tagged BS."""
    require(d >= 0, "distance must be non-negative", "d")
    require(density > 0, "density must be positive", "density")
    return -density * math.expm1(-math.pi * density * d * d)


def conditional_link_distance_pdf(r: float, d: float, density: float) -> float:
    """Link-distance density of an interferer at distance ``d``: Rayleigh truncated to [0, d]."""
    require(d > 0, "interferer distance must be positive", "d")
    require(density > 0, "density must be positive", "density")
    require(0 <= r <= d, "link distance must lie in [0, d]", "r")
    return (
        2.0 * math.pi * density * r * math.exp(-density * math.pi * r * r)
        / -math.expm1(-math.pi * density * d * d)
    )


def _exponent_swapped(c: float, alpha: float, epsilon: float, spec: QuadratureSpec) -> float:
    c2 = c ** (2.0 / alpha)
    one_minus = 1.0 - epsilon

    def integrand(u: float) -> float:
        if u == 0:
            return 0.0 if epsilon > 0 else float(tail_integral_hyp(0.0, alpha)) / c2
        return math.exp(-u) * u**epsilon * float(tail_integral_hyp(c2 * u**one_minus, alpha)) / c2

    value, _ = integrate(integrand, 0.0, spec=spec, level="laplace")
    return value


def _exponent_direct(c: float, alpha: float, epsilon: float, spec: QuadratureSpec) -> float:
    inner_spec = spec.tightened()
    power = alpha * epsilon / 2.0

    def inner(x: float) -> float:
        if x == 0:
            return 0.0
        cx = c * x**alpha

        def f(u: float) -> float:
            up = u**power
            return math.exp(-u) * up / (up + cx)

        value, _ = integrate(f, 0.0, x * x, spec=inner_spec, level="inner link distance")
        return x * value

    value, _ = integrate(inner, 0.0, spec=spec, level="outer interferer distance")
    return 2.0 * value


def _laplace_normalised(
    c: float, alpha: float, epsilon: float, spec: QuadratureSpec, direct: bool
) -> float:
    if math.isinf(c):
        return 1.0
    if c == 0:
        return 0.0
    exponent = (_exponent_direct if direct else _exponent_swapped)(c, alpha, epsilon, spec)
    return math.exp(-exponent)


def uplink_laplace(
    s: float,
    params: UplinkParams,
    spec: QuadratureSpec | None = None,
    direct: bool = False,
) -> float:
    """Laplace transform of the uplink interference at the tagged BS.

    By default the two-level integral over interferer and link distances is
    evaluated with the order swapped, which turns the interferer-distance
    integral into a closed-form tail. ``direct=True`` runs the literal nested
    quadrature; a failure names the level that did not converge.
    """
    require(s >= 0, "Laplace argument must be non-negative", "s")
    spec = spec or DEFAULT_SPEC
    if s == 0:
        return 1.0
    scale = (math.pi * params.density) ** (params.alpha * (1.0 - params.epsilon) / 2.0)
    c = 1.0 / (s * params.power * scale)
    return _laplace_normalised(c, params.alpha, params.epsilon, spec, direct)


def nu(r: float, tau: float, params: UplinkParams, spec: QuadratureSpec | None = None) -> float:
    """Interference factor of the uplink coverage at serving distance ``r``.

    Equal to ``uplink_laplace`` at s = tau * r^(alpha (1 - epsilon)) / p.
    """
    require(r >= 0, "serving distance must be non-negative", "r")
    require(tau > 0, "threshold must be positive", "tau")
    y = r * math.sqrt(math.pi * params.density)
    return _nu_normalised(y, tau, params, spec or DEFAULT_SPEC, False)


def _nu_normalised(
    y: float, tau: float, params: UplinkParams, spec: QuadratureSpec, direct: bool
) -> float:
    growth = params.alpha * (1.0 - params.epsilon)
    if growth == 0:
        c = 1.0 / tau
    else:
        if y == 0:
            return 1.0
        try:
            c = 1.0 / (tau * y**growth)
        except OverflowError:
            return 0.0
    return _laplace_normalised(c, params.alpha, params.epsilon, spec, direct)


def uplink_coverage(
    tau: float,
    params: UplinkParams,
    spec: QuadratureSpec | None = None,
    direct: bool = False,
) -> float:
    """Uplink SINR coverage for fractional power control.

    The outer integral runs over the normalised serving distance with weight
    2y e^(-y^2); the interference factor is solved to a ten times tighter
    tolerance and cached for the duration of the call.
    """
    require(tau > 0, "threshold must be positive", "tau")
    spec = spec or DEFAULT_SPEC
    inner_spec = spec.tightened()
    growth = params.alpha * (1.0 - params.epsilon)
    noise = tau * params.sigma2 / params.power
    cache: dict[float, float] = {}

    def factor(y: float) -> float:
        if y not in cache:
            cache[y] = _nu_normalised(y, tau, params, inner_spec, direct)
        return cache[y]

    def integrand(y: float) -> float:
        weight = 2.0 * y * math.exp(-y * y)
        if weight == 0:
            return 0.0
        if noise:
            weight *= math.exp(-noise * (y * y / (math.pi * params.density)) ** (growth / 2.0))
        return weight * factor(y)

    try:
        value, _ = integrate(integrand, 0.0, spec=spec, level="serving distance")
    except QuadratureError:
        logger.exception(f"Uplink coverage failed at tau={tau:.6g}, epsilon={params.epsilon}")
        raise
    logger.debug(f"Uplink coverage tau={tau:.6g}: {value:.10g} ({len(cache)} interference evaluations)")
    return min(1.0, max(0.0, value))


def uplink_coverage_full_inversion(
    tau: float, alpha: float, spec: QuadratureSpec | None = None
) -> float:
    """Full channel inversion without noise: exp(-rho)."""
    require(tau > 0, "threshold must be positive", "tau")
    return math.exp(-rho(tau, alpha, spec))


def coverage_curve(
    params: UplinkParams, grid: GridSpec, spec: QuadratureSpec | None = None
) -> CoverageCurve:
    return UplinkModel().curve(params, grid, spec)


class UplinkModel(CoverageModel):
    scenario = "uplink"

    def coverage(self, tau: float, params: UplinkParams, spec: QuadratureSpec | None = None) -> float:
        return uplink_coverage(tau, params, spec)

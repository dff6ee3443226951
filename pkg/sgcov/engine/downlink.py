"""Single-tier downlink coverage with Rayleigh fading.

The typical user sits at the origin and is served by its nearest BS. Every
coverage expression reduces to one kernel integral once the squared serving
distance is scaled by pi * lambda.
"""
import logging
import math
from typing import Literal

from scipy import special

from sgcov.core.errors import require
from sgcov.core.numerics import (
    exp_power_integral,
    gauss_exp_integral,
    integrate,
    rho,
    tail_integral,
)
from sgcov.engine.base import CoverageCurve, CoverageModel
from sgcov.models.run_config import GridSpec, QuadratureSpec
from sgcov.models.scenario import DownlinkParams, ShadowingSpec

logger = logging.getLogger(__name__)

Fading = Literal["rayleigh", "none"]


def mean_interference_annulus(
    density: float, power: float, alpha: float, a: float, b: float = math.inf
) -> float:
    """Mean interference at the origin from BSs in the ring a <= |x| <= b."""
    require(density > 0, "density must be positive", "density")
    require(power > 0, "power must be positive", "power")
    require(a >= 0 and b >= a, "annulus needs 0 <= a <= b", "b")
    if math.isinf(b):
        require(alpha > 2, "mean interference from an unbounded region diverges for alpha <= 2", "alpha")
        require(a > 0, "mean interference diverges at the origin when a = 0 and b is infinite", "a")
        return 2.0 * math.pi * density * power / (alpha - 2.0) * a ** (2.0 - alpha)
    if b == a:
        return 0.0
    require(a > 0, "mean interference diverges at the origin when a = 0", "a")
    if alpha == 2:
        return 2.0 * math.pi * density * power * math.log(b / a)
    return 2.0 * math.pi * density * power / (alpha - 2.0) * (a ** (2.0 - alpha) - b ** (2.0 - alpha))


def laplace_interference(
    s: float,
    density: float,
    power: float,
    alpha: float,
    r_excl: float = 0.0,
    fading: Fading = "rayleigh",
    spec: QuadratureSpec | None = None,
) -> float:
    """E[exp(-s I)] for interferers of a PPP outside radius ``r_excl``.

    ``rayleigh`` gives each interferer an exponential fade; ``none`` uses bare
    path loss.
    """
    require(s >= 0, "Laplace argument must be non-negative", "s")
    require(density > 0 and power > 0, "density and power must be positive", "density")
    require(alpha > 2, "path-loss exponent must be > 2", "alpha")
    require(r_excl >= 0, "exclusion radius must be non-negative", "r_excl")
    require(fading in ("rayleigh", "none"), f"unknown fading {fading!r}", "fading")
    if s == 0:
        return 1.0
    c = s * power
    scale = c ** (2.0 / alpha)

    if fading == "rayleigh":
        if alpha == 4 and r_excl == 0:
            return math.exp(-(math.pi**2) / 2.0 * density * math.sqrt(c))
        return math.exp(-math.pi * density * scale * tail_integral(r_excl**2 / scale, alpha, spec))

    if r_excl == 0:
        if alpha == 4:
            return math.exp(-math.pi * density * math.sqrt(math.pi * c))
        return math.exp(-math.pi * density * scale * special.gamma(1.0 - 2.0 / alpha))
    lower = r_excl / c ** (1.0 / alpha)
    value, _ = integrate(
        lambda y: -math.expm1(-(y**-alpha)) * 2.0 * y, lower, spec=spec, level="laplace"
    )
    return math.exp(-math.pi * density * scale * value)


def lognormal_fractional_moment(alpha: float, sigma_db: float) -> float:
    """E[chi^(2/alpha)] for unit-median lognormal chi with dB spread ``sigma_db``."""
    require(alpha > 0, "alpha must be positive", "alpha")
    require(sigma_db >= 0, "shadowing spread must be non-negative", "sigma_db")
    sigma = sigma_db * math.log(10.0) / 10.0
    return math.exp(0.5 * (2.0 / alpha) ** 2 * sigma**2)


def shadowing_equivalent_density(
    density: float, alpha: float, shadowing: ShadowingSpec | float | None
) -> float:
    """Density of the shadowing-free PPP seen by the receiver, lambda * E[chi^(2/alpha)].

    ``shadowing`` is a ``ShadowingSpec`` or the fractional moment itself.
    """
    require(density > 0, "density must be positive", "density")
    if shadowing is None:
        return density
    if isinstance(shadowing, ShadowingSpec):
        if shadowing.kind == "generic":
            moment = shadowing.fractional_moment
        else:
            moment = lognormal_fractional_moment(alpha, shadowing.sigma_db)
    else:
        moment = float(shadowing)
    require(
        moment is not None and math.isfinite(moment) and moment > 0,
        "fractional moment E[chi^(2/alpha)] must be finite and positive",
        "shadowing",
    )
    return density * moment


def effective_density(params: DownlinkParams) -> float:
    return shadowing_equivalent_density(params.density, params.alpha, params.shadowing)


def coverage_interflimited(tau: float, alpha: float, spec: QuadratureSpec | None = None) -> float:
    """SIR coverage 1 / (1 + rho); independent of density and power."""
    require(tau > 0, "threshold must be positive", "tau")
    return 1.0 / (1.0 + rho(tau, alpha, spec))


def coverage_alpha4_snr(tau: float, density: float, snr: float) -> float:
    """Coverage at alpha = 4 with noise, through the scaled Gaussian integral."""
    require(tau > 0, "threshold must be positive", "tau")
    require(density > 0, "density must be positive", "density")
    require(snr > 0, "SNR must be positive", "snr")
    kappa = 1.0 + math.sqrt(tau) * math.atan(math.sqrt(tau))
    if math.isinf(snr):
        return 1.0 / kappa
    a = math.pi * density * kappa
    return math.pi * density * gauss_exp_integral(a, tau / snr)


def coverage_general(tau: float, params: DownlinkParams, spec: QuadratureSpec | None = None) -> float:
    """Downlink SINR coverage for any alpha > 2.

    With noise this is one kernel integral in w = pi * lambda * r^2; without
    noise it is exactly 1 / (1 + rho). Shadowing enters through the
    equivalent density.
    """
    require(tau > 0, "threshold must be positive", "tau")
    r = rho(tau, params.alpha, spec)
    if params.sigma2 == 0:
        return 1.0 / (1.0 + r)
    density = effective_density(params)
    b = tau / (params.snr * (math.pi * density) ** (params.alpha / 2.0))
    return float(min(1.0, exp_power_integral(1.0 + r, b, params.alpha, spec)))


def coverage_curve(
    params: DownlinkParams, grid: GridSpec, spec: QuadratureSpec | None = None
) -> CoverageCurve:
    return DownlinkModel().curve(params, grid, spec)


class DownlinkModel(CoverageModel):
    scenario = "downlink"

    def coverage(self, tau: float, params: DownlinkParams, spec: QuadratureSpec | None = None) -> float:
        return coverage_general(tau, params, spec)

    def curve(self, params, grid, spec=None) -> CoverageCurve:
        curve = super().curve(params, grid, spec)
        density = effective_density(params)
        curve.details["effective_density"] = density
        if params.shadowing is not None:
            logger.info(f"Downlink with shadowing: equivalent density {density:.6g}")
        return curve

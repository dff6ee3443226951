"""k-tier heterogeneous network coverage.

Two association rules are supported. Under ``average_power`` the user joins
the tier whose nearest BS gives the largest mean received power; under
``instantaneous_power`` it is covered if any BS of any tier beats its tier
threshold, which has a closed analysis when every threshold exceeds 1.
"""
import logging
import math

import numpy as np

from sgcov.core.errors import ParameterError, require
from sgcov.core.numerics import exp_power_integral, integrate, rho, zeta_alpha
from sgcov.engine.base import CoverageCurve, CoverageModel
from sgcov.models.run_config import GridSpec, QuadratureSpec
from sgcov.models.scenario import HetNetParams

logger = logging.getLogger(__name__)


def _weights(params: HetNetParams) -> np.ndarray:
    """lambda_j * p_j^(2/alpha) for every tier."""
    delta = 2.0 / params.alpha
    return np.array([t.density * t.power**delta for t in params.tiers])


def _relative_density(i: int, params: HetNetParams) -> float:
    """Sum over tiers of lambda_j (p_j / p_i)^(2/alpha)."""
    tier = params.tier(i)
    return float(_weights(params).sum() / tier.power ** (2.0 / params.alpha))


def _require_rule(params: HetNetParams, rule: str) -> None:
    if params.rule != rule:
        raise ParameterError(f"operation needs rule={rule!r}, got {params.rule!r}", field="rule")


def association_probability(
    i: int, params: HetNetParams, method: str = "closed", spec: QuadratureSpec | None = None
) -> float:
    """Probability that the typical user is served by tier ``i`` under average-power association.

    ``method="quadrature"`` integrates the probability that tier ``i``'s
    nearest BS beats every other tier over its nearest-distance law.
    """
    tier = params.tier(i)
    if method == "closed":
        weights = _weights(params)
        return float(weights[i] / weights.sum())
    if method != "quadrature":
        raise ParameterError(f"unknown method {method!r}", field="method")
    others = _relative_density(i, params) - tier.density

    def f(r: float) -> float:
        nearest = 2.0 * math.pi * tier.density * r * math.exp(-math.pi * tier.density * r * r)
        return nearest * math.exp(-math.pi * others * r * r)

    scale = 1.0 / math.sqrt(math.pi * _relative_density(i, params))
    value, _ = integrate(lambda x: scale * f(scale * x), 0.0, spec=spec, level="association")
    return value


def serving_distance_conditional_pdf(r: float, i: int, params: HetNetParams) -> float:
    """Density of the serving distance given association with tier ``i``."""
    require(r >= 0, "distance must be non-negative", "r")
    tier = params.tier(i)
    total = _relative_density(i, params)
    a_i = association_probability(i, params)
    return 2.0 * math.pi * tier.density * r * math.exp(-math.pi * r * r * total) / a_i


def serving_distance_conditional_cdf(r: float, i: int, params: HetNetParams) -> float:
    require(r >= 0, "distance must be non-negative", "r")
    return -math.expm1(-math.pi * r * r * _relative_density(i, params))


def tier_coverage(i: int, params: HetNetParams, spec: QuadratureSpec | None = None) -> float:
    """Coverage given association with tier ``i`` (average-power rule)."""
    tier = params.tier(i)
    total = _relative_density(i, params)
    r = rho(tier.tau, params.alpha, spec)
    b = tier.tau * params.sigma2 / (tier.power * (math.pi * total) ** (params.alpha / 2.0))
    return float(min(1.0, exp_power_integral(1.0 + r, b, params.alpha, spec)))


def hetnet_coverage_avg(params: HetNetParams, spec: QuadratureSpec | None = None) -> float:
    """Coverage under average-power association, summed over tiers."""
    _require_rule(params, "average_power")
    total = sum(
        association_probability(i, params) * tier_coverage(i, params, spec)
        for i in range(params.k)
    )
    return float(min(1.0, total))


def hetnet_coverage_inst_nonoise(params: HetNetParams) -> float:
    """Closed-form coverage under instantaneous-power association without noise."""
    params.require_single_coverer()
    delta = 2.0 / params.alpha
    weights = _weights(params)
    taus = np.array([t.tau for t in params.tiers])
    return float(math.pi / zeta_alpha(params.alpha) * (weights * taus**-delta).sum() / weights.sum())


def hetnet_coverage_inst(
    params: HetNetParams, spec: QuadratureSpec | None = None, method: str = "auto"
) -> float:
    """Coverage under instantaneous-power association, every tier threshold > 1.

    ``auto`` uses the closed form when there is no noise; ``quadrature``
    always integrates over the distance to the covering BS.
    """
    _require_rule(params, "instantaneous_power")
    params.require_single_coverer()
    if method not in ("auto", "quadrature"):
        raise ParameterError(f"unknown method {method!r}", field="method")
    if params.sigma2 == 0 and method == "auto":
        return hetnet_coverage_inst_nonoise(params)
    return _coverage_inst_quadrature(params, spec)


def _coverage_inst_quadrature(params: HetNetParams, spec: QuadratureSpec | None) -> float:
    delta = 2.0 / params.alpha
    half = params.alpha / 2.0
    zeta = zeta_alpha(params.alpha)
    total_weight = _weights(params).sum()
    value = 0.0
    for i, tier in enumerate(params.tiers):
        # w = a * x^2 turns the tier term into pi * lambda_i / a times a unit-rate integral.
        a = (tier.tau / tier.power) ** delta * zeta * total_weight
        b = tier.tau * params.sigma2 / tier.power * a**-half
        term, _ = integrate(
            lambda w: math.exp(-w - b * w**half), 0.0, spec=spec, level=f"tier {i}"
        )
        value += math.pi * tier.density / a * term
    return float(min(1.0, value))


def coverage_curve(
    params: HetNetParams, grid: GridSpec, spec: QuadratureSpec | None = None
) -> CoverageCurve:
    """Coverage with every tier threshold scaled by each grid value."""
    return HetNetModel().curve(params, grid, spec)


class HetNetModel(CoverageModel):
    scenario = "hetnet"

    def coverage(self, tau: float, params: HetNetParams, spec: QuadratureSpec | None = None) -> float:
        scaled = params.with_scaled_thresholds(tau)
        if scaled.rule == "instantaneous_power":
            return hetnet_coverage_inst(scaled, spec)
        return hetnet_coverage_avg(scaled, spec)

    def validate_params(self, params: HetNetParams) -> list[str]:
        if params.rule == "instantaneous_power":
            low = [i for i, t in enumerate(params.tiers) if t.tau <= 1]
            if low:
                return [f"instantaneous-power analysis needs tau > 1 (tiers {low})"]
        return []

    def curve(self, params, grid, spec=None) -> CoverageCurve:
        curve = super().curve(params, grid, spec)
        curve.details["threshold_scale"] = True
        curve.details["rule"] = params.rule
        return curve

"""Scenario parameter records.

All quantities are linear (powers, thresholds, noise); dB appears only at the
command-line boundary. Densities are points per unit area in whatever length
unit the caller uses, and the received SNR is referenced to distance 1 in that
same unit.
"""
import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from sgcov.core.errors import ParameterError

AssociationRule = Literal["average_power", "instantaneous_power"]

_STRICT = ConfigDict(extra="forbid", frozen=True)


class ShadowingSpec(BaseModel):
    """Per-link shadowing law.

    ``lognormal`` is unit-median with spread ``sigma_db``. ``generic`` supplies
    only the fractional moment E[chi^(2/alpha)] and is usable analytically.
    """

    model_config = _STRICT

    kind: Literal["lognormal", "generic"] = "lognormal"
    sigma_db: float = Field(default=0.0, ge=0)
    fractional_moment: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == "generic" and self.fractional_moment is None:
            raise ValueError("generic shadowing needs fractional_moment")
        if self.fractional_moment is not None and not math.isfinite(self.fractional_moment):
            raise ValueError("fractional moment must be finite")
        return self


class DownlinkParams(BaseModel):
    model_config = _STRICT

    density: float = Field(gt=0, allow_inf_nan=False)
    power: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    alpha: float = Field(default=4.0, gt=2, allow_inf_nan=False)
    sigma2: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    shadowing: ShadowingSpec | None = None

    @property
    def snr(self) -> float:
        """Received SNR at unit distance; infinite without noise."""
        return math.inf if self.sigma2 == 0 else self.power / self.sigma2


class UplinkParams(BaseModel):
    """Uplink with fractional power control p * R^(alpha * epsilon).

    ``user_density`` is only read by the simulator.
    """

    model_config = _STRICT

    density: float = Field(gt=0, allow_inf_nan=False)
    power: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    alpha: float = Field(default=4.0, gt=2, allow_inf_nan=False)
    epsilon: float = Field(default=1.0, ge=0, le=1)
    sigma2: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    user_density: float | None = Field(default=None, gt=0, allow_inf_nan=False)

    @property
    def snr(self) -> float:
        return math.inf if self.sigma2 == 0 else self.power / self.sigma2


class TierSpec(BaseModel):
    model_config = _STRICT

    density: float = Field(gt=0, allow_inf_nan=False)
    power: float = Field(gt=0, allow_inf_nan=False)
    tau: float = Field(gt=0, allow_inf_nan=False)


class HetNetParams(BaseModel):
    """k overlaid tiers sharing one path-loss exponent."""

    model_config = _STRICT

    tiers: tuple[TierSpec, ...] = Field(min_length=1)
    alpha: float = Field(default=4.0, gt=2, allow_inf_nan=False)
    sigma2: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    rule: AssociationRule = "average_power"

    @property
    def k(self) -> int:
        return len(self.tiers)

    def tier(self, i: int) -> TierSpec:
        if not 0 <= i < len(self.tiers):
            raise ParameterError(f"tier index {i} out of range for {self.k} tiers", field="i")
        return self.tiers[i]

    def with_scaled_thresholds(self, scale: float) -> "HetNetParams":
        """Copy with every tier threshold multiplied by ``scale``."""
        tiers = tuple(t.model_copy(update={"tau": t.tau * scale}) for t in self.tiers)
        return self.model_copy(update={"tiers": tiers})

    def require_single_coverer(self) -> None:
        """Reject thresholds for which the instantaneous-power analysis does not hold."""
        low = [i for i, t in enumerate(self.tiers) if t.tau <= 1]
        if low:
            raise ParameterError(
                "instantaneous-power analysis needs every tier threshold > 1 so that at most "
                f"one BS across all tiers can satisfy its threshold (tiers {low} have tau <= 1)",
                field="tiers",
            )


ScenarioParams = DownlinkParams | UplinkParams | HetNetParams

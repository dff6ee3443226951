"""Run records: quadrature tolerances, simulation settings, threshold grids and
the top-level run configuration read from JSON files and presets."""
import itertools
import json
import logging
import math
from importlib import resources
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from sgcov.config import settings
from sgcov.core.errors import ConfigError
from sgcov.models.scenario import DownlinkParams, HetNetParams, UplinkParams

logger = logging.getLogger(__name__)

Scenario = Literal["downlink", "uplink", "hetnet"]
Mode = Literal["analytic", "simulate", "validate"]
OutputFormat = Literal["csv", "json"]

PRESET_PREFIX = "preset:"

# Scenario fields that are not a single number.
NON_SWEEPABLE = {"shadowing", "tiers", "rule"}

_STRICT = ConfigDict(extra="forbid", frozen=True)


class QuadratureSpec(BaseModel):
    model_config = _STRICT

    epsrel: float = Field(default_factory=lambda: settings.QUAD_EPSREL, gt=0)
    epsabs: float = Field(default_factory=lambda: settings.QUAD_EPSABS, gt=0)
    max_subdivisions: int = Field(default_factory=lambda: settings.QUAD_LIMIT, ge=1)

    def tightened(self, factor: float = 10.0) -> "QuadratureSpec":
        """Tolerances divided by ``factor``, for the inner level of a nested integral."""
        return self.model_copy(
            update={"epsrel": self.epsrel / factor, "epsabs": self.epsabs / factor}
        )


class SimConfig(BaseModel):
    """Monte Carlo settings. ``threshold_grid`` is linear and strictly increasing."""

    model_config = _STRICT

    trials: int = Field(default_factory=lambda: settings.SIM_TRIALS, ge=1)
    delta: float = Field(default_factory=lambda: settings.SIM_DELTA, gt=0, le=0.1)
    master_seed: int = Field(default=0, ge=0)
    threshold_grid: tuple[float, ...] = Field(default=(1.0,), min_length=1)
    min_expected_bs: int = Field(default_factory=lambda: settings.SIM_MIN_EXPECTED_BS, ge=1)
    batch_size: int = Field(default_factory=lambda: settings.SIM_BATCH_SIZE, ge=1)
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)
    max_empty_redraws: int = Field(default_factory=lambda: settings.SIM_MAX_EMPTY_REDRAWS, ge=1)
    window_radius: float | None = Field(default=None, gt=0, allow_inf_nan=False)

    @field_validator("threshold_grid")
    @classmethod
    def _increasing(cls, grid: tuple[float, ...]) -> tuple[float, ...]:
        if any(not math.isfinite(t) or t <= 0 for t in grid):
            raise ValueError("thresholds must be finite and positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("threshold grid must be strictly increasing")
        return grid


class GridSpec(BaseModel):
    """Threshold grid ``start:step:stop`` in dB, stop inclusive."""

    model_config = _STRICT

    start_db: float = -10.0
    step_db: float = Field(default=1.0, gt=0)
    stop_db: float = 20.0

    @model_validator(mode="after")
    def _ordered(self):
        if not self.start_db < self.stop_db:
            raise ValueError("grid start must be below grid stop")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) == 1:
            value = float(parts[0])
            return cls.single(value)
        if len(parts) != 3:
            raise ValueError(f"grid must look like start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        return cls(start_db=start, step_db=step, stop_db=stop)

    @classmethod
    def single(cls, tau_db: float) -> "GridSpec":
        # A one-point grid: the step is larger than the span.
        return cls(start_db=tau_db, step_db=1.0, stop_db=tau_db + 0.5)

    def values_db(self) -> np.ndarray:
        count = int(math.floor((self.stop_db - self.start_db) / self.step_db + 1e-9)) + 1
        return np.round(self.start_db + self.step_db * np.arange(count), 12)

    def values_linear(self) -> np.ndarray:
        return np.power(10.0, self.values_db() / 10.0)


class RunConfig(BaseModel):
    """One run: a scenario, a threshold grid and what to do with them.

    Exactly one of ``downlink``, ``uplink``, ``hetnet`` is set and it must
    match ``scenario``.
    """

    model_config = _STRICT

    scenario: Scenario
    downlink: DownlinkParams | None = None
    uplink: UplinkParams | None = None
    hetnet: HetNetParams | None = None
    grid: GridSpec = Field(default_factory=GridSpec)
    mode: Mode = "analytic"
    sim: SimConfig = Field(default_factory=SimConfig)
    quadrature: QuadratureSpec = Field(default_factory=QuadratureSpec)
    tolerance: float = Field(default=0.01, gt=0, le=1)
    out: str | None = None
    format: OutputFormat = "csv"
    sweep: dict[str, tuple[float, ...]] | None = None

    @model_validator(mode="after")
    def _check_scenario(self):
        given = [name for name in ("downlink", "uplink", "hetnet") if getattr(self, name)]
        if given != [self.scenario]:
            raise ValueError(
                f"scenario {self.scenario!r} needs exactly the {self.scenario!r} block, got {given}"
            )
        if (
            self.scenario == "hetnet"
            and self.hetnet.rule == "instantaneous_power"
            and self.mode != "simulate"
        ):
            # Hetnet grids scale every tier threshold, so the smallest scale decides.
            smallest = float(self.grid.values_linear().min())
            low = [i for i, t in enumerate(self.hetnet.tiers) if t.tau * smallest <= 1]
            if low:
                raise ValueError(
                    "instantaneous_power analytics require tau > 1 for every tier, the condition "
                    "under which at most one BS across all tiers can satisfy its threshold "
                    f"(tiers {low} at grid scale {smallest:.6g}); use mode=simulate for lower "
                    "thresholds"
                )
        if self.sweep:
            scalars = set(type(self.params).model_fields) - NON_SWEEPABLE
            unknown = sorted(set(self.sweep) - scalars)
            if unknown:
                raise ValueError(
                    f"cannot sweep {unknown} of {self.scenario!r}; sweepable: {sorted(scalars)}"
                )
            empty = [name for name, values in self.sweep.items() if not values]
            if empty:
                raise ValueError(f"sweep axes without values: {empty}")
        return self

    @property
    def params(self) -> DownlinkParams | UplinkParams | HetNetParams:
        return getattr(self, self.scenario)

    def resolved_sim(self) -> SimConfig:
        """``sim`` with its threshold grid replaced by this run's grid."""
        grid = tuple(float(t) for t in self.grid.values_linear())
        return self.sim.model_copy(update={"threshold_grid": grid})


def _strip_comment(data):
    if isinstance(data, dict):
        data = {k: v for k, v in data.items() if k != "_comment"}
    return data


def _validation_to_config_error(exc: ValidationError, source: str) -> ConfigError:
    first = exc.errors()[0]
    key_path = ".".join(str(part) for part in first["loc"]) or None
    details = "; ".join(
        f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
    )
    return ConfigError(f"{source}: {details}", key_path=key_path)


def config_from_dict(data: dict, source: str = "<config>") -> RunConfig:
    try:
        return RunConfig.model_validate(_strip_comment(data))
    except ValidationError as exc:
        raise _validation_to_config_error(exc, source) from exc


def preset_names() -> list[str]:
    root = resources.files("sgcov.presets")
    return sorted(p.name.removesuffix(".json") for p in root.iterdir() if p.name.endswith(".json"))


def _read_source(path: str | Path) -> tuple[str, str]:
    text_path = str(path)
    if text_path.startswith(PRESET_PREFIX):
        name = text_path[len(PRESET_PREFIX):]
        resource = resources.files("sgcov.presets").joinpath(f"{name}.json")
        if not resource.is_file():
            raise ConfigError(
                f"unknown preset {name!r}; available: {', '.join(preset_names())}",
                key_path="preset",
            )
        return resource.read_text(encoding="utf-8"), text_path
    file_path = Path(path)
    if not file_path.is_file():
        raise ConfigError(f"config file not found: {file_path}")
    return file_path.read_text(encoding="utf-8"), str(file_path)


def parse_config_file(path: str | Path) -> RunConfig:
    """Read and strictly validate a JSON run configuration.

    ``path`` may also be ``preset:<name>``. A top-level ``_comment`` key is
    ignored; every other unknown key is an error.
    """
    text, source = _read_source(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{source}: invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    config = config_from_dict(data, source)
    logger.debug(f"Loaded {config.scenario} run config from {source}")
    return config


def dump_config(config: RunConfig) -> dict:
    """JSON-ready form of a run config that ``config_from_dict`` accepts back."""
    return config.model_dump(mode="json", exclude_none=True)


def expand_sweep(
    config: RunConfig, axes: dict[str, list[float] | tuple[float, ...]]
) -> list[tuple[dict, RunConfig]]:
    """One run config per point of the cartesian product of ``axes``.

    Each axis names a field of the scenario block. The returned configs carry
    no ``sweep`` of their own.
    """
    names = list(axes)
    base = dump_config(config)
    base.pop("sweep", None)
    points = []
    for values in itertools.product(*(axes[n] for n in names)):
        point = dict(zip(names, values))
        data = {**base, config.scenario: {**base[config.scenario], **point}}
        label = ", ".join(f"{k}={v:g}" for k, v in point.items())
        points.append((point, config_from_dict(data, source=f"sweep point {label}")))
    return points


def sweep_points(config: RunConfig) -> list[tuple[dict, RunConfig]]:
    """The configs a run config stands for: its ``sweep`` points, or itself."""
    if not config.sweep:
        return [({}, config)]
    return expand_sweep(config, config.sweep)

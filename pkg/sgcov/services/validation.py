"""Analytic-versus-simulation comparison and the built-in regression suite."""
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from sgcov.core.errors import ParameterError
from sgcov.engine.base import CoverageCurve
from sgcov.engine.evaluator import evaluator
from sgcov.models.run_config import PRESET_PREFIX, RunConfig, parse_config_file, sweep_points
from sgcov.services.simulator import CoverageEstimate, simulate

logger = logging.getLogger(__name__)


class ValidationStatus(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass
class ValidationReport:
    """Per-threshold analytic/empirical pairs and the verdict."""

    tau_db: np.ndarray
    tau_linear: np.ndarray
    analytic: np.ndarray
    empirical: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    trials: int
    tolerance: float
    status: ValidationStatus
    name: str = ""
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == ValidationStatus.PASS

    @property
    def gap(self) -> np.ndarray:
        return np.abs(self.analytic - self.empirical)

    @property
    def max_gap(self) -> float:
        return float(self.gap.max())

    @property
    def inside_ci_fraction(self) -> float:
        inside = (self.analytic >= self.ci_low) & (self.analytic <= self.ci_high)
        return float(np.mean(inside))

    def summary(self) -> dict:
        return {
            "name": self.name,
            "status": self.status.value,
            "passed": self.passed,
            "max_gap": self.max_gap,
            "inside_ci_fraction": self.inside_ci_fraction,
            "tolerance": self.tolerance,
            "trials": self.trials,
            "points": len(self.analytic),
        }

    def rows(self) -> list[dict]:
        return [
            {
                "tau_db": float(db),
                "tau_linear": float(t),
                "coverage": float(e),
                "ci_low": float(lo),
                "ci_high": float(hi),
                "trials": self.trials,
                "analytic": float(a),
                "gap": float(g),
            }
            for db, t, e, lo, hi, a, g in zip(
                self.tau_db,
                self.tau_linear,
                self.empirical,
                self.ci_low,
                self.ci_high,
                self.analytic,
                self.gap,
            )
        ]


def compare_curves(
    analytic: CoverageCurve, empirical: CoverageEstimate, tol: float, name: str = ""
) -> ValidationReport:
    """Pass iff the largest absolute gap is within ``tol``."""
    if len(analytic.tau_linear) != len(empirical.tau_linear) or not np.allclose(
        analytic.tau_linear, empirical.tau_linear, rtol=1e-12, atol=0.0
    ):
        raise ParameterError("analytic and empirical threshold grids differ", field="grid")
    gap = np.abs(analytic.coverage - empirical.coverage)
    status = ValidationStatus.PASS if gap.max() <= tol else ValidationStatus.FAIL
    report = ValidationReport(
        tau_db=np.asarray(analytic.tau_db),
        tau_linear=np.asarray(analytic.tau_linear),
        analytic=np.asarray(analytic.coverage, dtype=float),
        empirical=np.asarray(empirical.coverage, dtype=float),
        ci_low=empirical.ci_low,
        ci_high=empirical.ci_high,
        trials=empirical.trials,
        tolerance=tol,
        status=status,
        name=name,
        details={"window_radius": empirical.window_radius, **empirical.details},
    )
    logger.info(
        f"Validation {name or '<unnamed>'}: {status.value}, max gap {report.max_gap:.4g} "
        f"(tol {tol:g}), {report.inside_ci_fraction:.0%} of points inside the 95% CI"
    )
    return report


def validate_config(config: RunConfig, name: str = "") -> ValidationReport:
    """Analytic curve and simulation of one run config, compared on its grid."""
    analytic = evaluator.evaluate(config.scenario, config.params, config.grid, config.quadrature)
    empirical = simulate(config.params, config.resolved_sim())
    return compare_curves(analytic, empirical, config.tolerance, name=name or config.scenario)


# Presets exercised by `sgcov validate`; each carries its own grid and tolerance.
REGRESSION_PRESETS = (
    "dl-nonoise-a4",
    "dl-snr10-a4",
    "dl-shadowing-8db",
    "hetnet-3tier-avg",
    "hetnet-3tier-inst",
    "fig5-uplink",
)


def regression_suite(
    names: list[str] | None = None,
    trials: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
) -> list[ValidationReport]:
    """Run the named regression presets (all by default) in validate mode."""
    reports = []
    for name in names or REGRESSION_PRESETS:
        config = parse_config_file(f"{PRESET_PREFIX}{name}")
        overrides = {
            key: value
            for key, value in (("trials", trials), ("master_seed", seed), ("workers", workers))
            if value is not None
        }
        config = config.model_copy(
            update={"mode": "validate", "sim": config.sim.model_copy(update=overrides)}
        )
        for point, point_config in sweep_points(config):
            label = " ".join([name, *(f"{k}={v:g}" for k, v in point.items())])
            reports.append(validate_config(point_config, name=label))
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.warning(f"Regression suite: {len(failed)} of {len(reports)} failed: {failed}")
    else:
        logger.info(f"Regression suite: all {len(reports)} scenarios passed")
    return reports

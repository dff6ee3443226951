"""Executes run configs in analytic, simulate or validate mode, singly or as sweeps."""
import logging
from dataclasses import dataclass

from sgcov.engine.base import CoverageCurve
from sgcov.engine.evaluator import ScenarioEvaluator
from sgcov.models.run_config import RunConfig, expand_sweep, sweep_points
from sgcov.services.simulator import CoverageEstimate, simulate
from sgcov.services.validation import ValidationReport, validate_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_VALIDATION_FAILED = 3


@dataclass
class RunOutcome:
    config: RunConfig
    result: CoverageCurve | CoverageEstimate | ValidationReport

    @property
    def exit_code(self) -> int:
        if isinstance(self.result, ValidationReport) and not self.result.passed:
            return EXIT_VALIDATION_FAILED
        return EXIT_OK


class RunService:
    """
    Main run orchestrator.

    Workflow:
    1. Analytic curve over the config grid (analytic, validate)
    2. Simulation over the same grid (simulate, validate)
    3. Comparison against the config tolerance (validate)
    """

    def __init__(self):
        self.evaluator = ScenarioEvaluator()

    def analytic(self, config: RunConfig) -> CoverageCurve:
        return self.evaluator.evaluate(config.scenario, config.params, config.grid, config.quadrature)

    def simulate(self, config: RunConfig) -> CoverageEstimate:
        return simulate(config.params, config.resolved_sim())

    def validate(self, config: RunConfig, name: str = "") -> ValidationReport:
        return validate_config(config, name)

    def execute(self, config: RunConfig) -> RunOutcome:
        logger.info(f"Running {config.scenario} in {config.mode} mode")
        if config.mode == "analytic":
            result = self.analytic(config)
        elif config.mode == "simulate":
            result = self.simulate(config)
        else:
            result = self.validate(config)
        return RunOutcome(config, result)

    def sweep(self, config: RunConfig, axes: dict[str, list]) -> list[tuple[dict, RunOutcome]]:
        """
        Run the cartesian product of scenario parameter values.

        Args:
            config: Base run config
            axes: Scenario field name -> values to try

        Returns:
            One (point, outcome) pair per combination, in product order
        """
        return self._run_points(expand_sweep(config, axes))

    def run(self, config: RunConfig) -> list[tuple[dict, RunOutcome]]:
        """Execute a config, or every point of its ``sweep`` when it has one."""
        return self._run_points(sweep_points(config))

    def _run_points(self, points: list[tuple[dict, RunConfig]]) -> list[tuple[dict, RunOutcome]]:
        outcomes = []
        for point, config in points:
            outcomes.append((point, self.execute(config)))
            if point:
                logger.debug(f"Sweep point {point} done")
        return outcomes

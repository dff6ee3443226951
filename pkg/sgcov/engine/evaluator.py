"""Scenario name to analytic model lookup."""
from typing import Type

from sgcov.core.errors import ParameterError
from sgcov.engine.base import CoverageCurve, CoverageModel
from sgcov.engine.downlink import DownlinkModel
from sgcov.engine.hetnet import HetNetModel
from sgcov.engine.uplink import UplinkModel
from sgcov.models.run_config import GridSpec, QuadratureSpec


class ScenarioEvaluator:
    """Runs the analytic model of a named scenario over a threshold grid."""

    MODELS: dict[str, Type[CoverageModel]] = {
        "downlink": DownlinkModel,
        "uplink": UplinkModel,
        "hetnet": HetNetModel,
    }

    def __init__(self):
        self._model_instances: dict[str, CoverageModel] = {}

    def _get_model(self, scenario: str) -> CoverageModel:
        if scenario not in self._model_instances:
            model_class = self.MODELS.get(scenario)
            if model_class is None:
                raise ParameterError(f"Unknown scenario: {scenario}", field="scenario")
            self._model_instances[scenario] = model_class()
        return self._model_instances[scenario]

    def evaluate(
        self, scenario: str, params, grid: GridSpec, spec: QuadratureSpec | None = None
    ) -> CoverageCurve:
        """
        Analytic coverage curve for one scenario.

        Args:
            scenario: downlink, uplink or hetnet
            params: Parameter record of that scenario
            grid: Threshold grid (threshold scale for hetnet)
            spec: Quadrature tolerances

        Returns:
            CoverageCurve with one value per grid point
        """
        model = self._get_model(scenario)
        errors = model.validate_params(params)
        if errors:
            raise ParameterError(f"Invalid parameters: {'; '.join(errors)}", field=scenario)
        return model.curve(params, grid, spec)

    def coverage(self, scenario: str, tau: float, params, spec: QuadratureSpec | None = None) -> float:
        return self._get_model(scenario).coverage(tau, params, spec)

    @classmethod
    def get_supported_scenarios(cls) -> list[str]:
        return sorted(cls.MODELS)


evaluator = ScenarioEvaluator()

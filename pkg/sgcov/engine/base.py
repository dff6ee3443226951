"""Coverage model interface and the curve record every model returns."""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from sgcov.models.run_config import GridSpec, QuadratureSpec


@dataclass(frozen=True)
class CoverageCurve:
    """Coverage probability along a threshold grid.

    For HetNet curves the grid holds the common scale applied to every tier
    threshold rather than a threshold itself.
    """

    tau_db: np.ndarray
    tau_linear: np.ndarray
    coverage: np.ndarray
    source: str = "analytic"
    details: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.coverage)

    def rows(self) -> list[dict[str, Any]]:
        return [
            {"tau_db": float(db), "tau_linear": float(lin), "coverage": float(c)}
            for db, lin, c in zip(self.tau_db, self.tau_linear, self.coverage)
        ]


class CoverageModel(ABC):
    """Analytic coverage of one scenario, one threshold at a time."""

    scenario: str = ""

    @abstractmethod
    def coverage(self, tau: float, params, spec: QuadratureSpec | None = None) -> float:
        """
        Coverage probability at one linear threshold.

        Args:
            tau: Linear threshold (a threshold scale for HetNet scenarios)
            params: Scenario parameter record
            spec: Quadrature tolerances

        Returns:
            Probability in [0, 1]
        """

    def validate_params(self, params) -> list[str]:
        """
        Check that ``params`` can be evaluated by this model.

        Returns:
            List of problems (empty if valid)
        """
        return []

    def curve(self, params, grid: GridSpec, spec: QuadratureSpec | None = None) -> CoverageCurve:
        tau_db = grid.values_db()
        tau_linear = grid.values_linear()
        values = np.array([self.coverage(float(t), params, spec) for t in tau_linear])
        return CoverageCurve(
            tau_db=tau_db,
            tau_linear=tau_linear,
            coverage=np.clip(values, 0.0, 1.0),
            details={"scenario": self.scenario},
        )

"""sgcov services: simulation, validation, export and run orchestration."""
from sgcov.services.exports import ExportService, export_service
from sgcov.services.runner import RunOutcome, RunService
from sgcov.services.simulator import CoverageEstimate, SimulationTrace, simulate
from sgcov.services.validation import ValidationReport, compare_curves, regression_suite

__all__ = [
    "CoverageEstimate",
    "SimulationTrace",
    "simulate",
    "ValidationReport",
    "compare_curves",
    "regression_suite",
    "ExportService",
    "export_service",
    "RunService",
    "RunOutcome",
]

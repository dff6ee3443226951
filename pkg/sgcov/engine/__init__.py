"""sgcov analytic engine - coverage models per scenario."""
from sgcov.engine.base import CoverageCurve, CoverageModel
from sgcov.engine.downlink import DownlinkModel
from sgcov.engine.evaluator import ScenarioEvaluator, evaluator
from sgcov.engine.hetnet import HetNetModel
from sgcov.engine.uplink import UplinkModel

__all__ = [
    "CoverageModel",
    "CoverageCurve",
    "DownlinkModel",
    "UplinkModel",
    "HetNetModel",
    "ScenarioEvaluator",
    "evaluator",
]

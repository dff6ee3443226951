"""sgcov parameter and run records."""
from sgcov.models.run_config import (
    GridSpec,
    QuadratureSpec,
    RunConfig,
    SimConfig,
    parse_config_file,
)
from sgcov.models.scenario import (
    DownlinkParams,
    HetNetParams,
    ShadowingSpec,
    TierSpec,
    UplinkParams,
)

__all__ = [
    "DownlinkParams",
    "UplinkParams",
    "TierSpec",
    "HetNetParams",
    "ShadowingSpec",
    "QuadratureSpec",
    "SimConfig",
    "GridSpec",
    "RunConfig",
    "parse_config_file",
]

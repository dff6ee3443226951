"""Shared fixtures for the sgcov test suite."""
import numpy as np
import pytest

from sgcov.core.point_process import PointSample, Window
from sgcov.models import DownlinkParams, HetNetParams, QuadratureSpec, SimConfig, TierSpec


@pytest.fixture
def quad():
    return QuadratureSpec()


@pytest.fixture
def two_realization_process():
    """Toy process with exactly two possible realizations.

    With probability 1/4 it is {(1, 0), (0, 1)}; with probability 3/4 it is
    {(0, 0), (1, 1), (2, 2)}.
    """
    window = Window.disk(3.0)
    first = PointSample(np.array([[1.0, 0.0], [0.0, 1.0]]), window, 1.0)
    second = PointSample(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]), window, 1.0)
    return [(0.25, first), (0.75, second)]


@pytest.fixture
def downlink_params():
    return DownlinkParams(density=1.0, power=1.0, alpha=4.0, sigma2=0.0)


@pytest.fixture
def three_tiers():
    """Macro/pico/femto densities 1:10:100 and powers 100:10:1."""

    def build(tau: float = 1.0, rule: str = "average_power", sigma2: float = 0.0) -> HetNetParams:
        return HetNetParams(
            tiers=(
                TierSpec(density=1e-6, power=100.0, tau=tau),
                TierSpec(density=1e-5, power=10.0, tau=tau),
                TierSpec(density=1e-4, power=1.0, tau=tau),
            ),
            alpha=4.0,
            sigma2=sigma2,
            rule=rule,
        )

    return build


@pytest.fixture
def sim_config():
    """Small, seeded simulation settings for quick statistical checks."""

    def build(trials: int = 2000, grid=(1.0,), seed: int = 11, **overrides) -> SimConfig:
        return SimConfig(
            trials=trials, threshold_grid=tuple(grid), master_seed=seed, **overrides
        )

    return build

"""Seeded random streams.

A run is driven by one master seed. Each trial gets its own substream keyed by
its index, so any split of trials across workers draws the same numbers.
"""
import numpy as np

from sgcov.core.errors import require

SeedLike = int | np.random.Generator | None


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Return a generator for a standalone operation."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is not None:
        require(int(seed) >= 0, "seed must be a non-negative integer", "seed")
    return np.random.Generator(np.random.PCG64(seed))


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Independent substream for trial number ``trial`` of a run."""
    require(master_seed >= 0, "master seed must be a non-negative integer", "master_seed")
    seq = np.random.SeedSequence(master_seed, spawn_key=(trial,))
    return np.random.Generator(np.random.PCG64(seq))


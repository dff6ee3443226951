"""Parallel trial batches.

A run is split into fixed-size batches of consecutive trial indices. Batches
fan out to a process pool (or run in-process with one worker) and a
completion handler stitches their results back together in batch order.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from sgcov.core.errors import SimulationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BatchJob:
    """Trials ``start`` .. ``stop - 1`` of one run."""

    scenario: str
    params: object
    config: object
    radius: float
    start: int
    stop: int
    options: dict = field(default_factory=dict)


@dataclass
class BatchResult:
    """Per-trial outputs of one batch, in trial order."""

    start: int
    stats: np.ndarray
    serving_distance: np.ndarray
    serving_tier: np.ndarray
    covering: np.ndarray
    redraws: int = 0


def split_batches(trials: int, batch_size: int) -> list[tuple[int, int]]:
    return [(s, min(s + batch_size, trials)) for s in range(0, trials, batch_size)]


def batch_completion_handler(results: list[BatchResult]) -> BatchResult:
    """
    Called when all batches are finished.
    Concatenates batch outputs in trial order.
    """
    ordered = sorted(results, key=lambda r: r.start)
    expected = 0
    for res in ordered:
        if res.start != expected:
            raise SimulationError(f"missing trials {expected}..{res.start - 1} in batch results")
        expected += len(res.stats)
    merged = BatchResult(
        start=0,
        stats=np.concatenate([r.stats for r in ordered]),
        serving_distance=np.concatenate([r.serving_distance for r in ordered]),
        serving_tier=np.concatenate([r.serving_tier for r in ordered]),
        covering=np.concatenate([r.covering for r in ordered]),
        redraws=sum(r.redraws for r in ordered),
    )
    logger.debug(f"Merged {len(ordered)} batches, {len(merged.stats)} trials")
    return merged


def run_trials(
    worker: Callable[[BatchJob], BatchResult], jobs: list[BatchJob], workers: int = 1
) -> BatchResult:
    """
    Orchestrator: runs every batch job and reduces the results.

    ``worker`` must be a module-level function so it can be pickled.
    """
    if not jobs:
        raise SimulationError("no trial batches to run")
    if workers <= 1 or len(jobs) == 1:
        return batch_completion_handler([worker(job) for job in jobs])

    logger.info(f"Dispatching {len(jobs)} batches to {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(worker, job) for job in jobs]
        results = []
        for job, future in zip(jobs, futures):
            try:
                results.append(future.result())
            except Exception as e:
                logger.exception(f"Trial batch {job.start}..{job.stop - 1} failed: {e}")
                raise
    return batch_completion_handler(results)

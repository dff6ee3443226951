"""sgcov trial fan-out."""
from sgcov.tasks.trials import BatchJob, BatchResult, run_trials, split_batches

__all__ = ["BatchJob", "BatchResult", "run_trials", "split_batches"]

import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from typing import TypeVar

from loguru import logger
from tqdm import tqdm

from collapsim import __version__
from collapsim.config import ExperimentConfig
from collapsim.models import ExperimentResult, RunSummary
from collapsim.utils import trial_seed, worker_count

T = TypeVar("T")


def run_trials(
    trial: Callable[[int, int], T],
    n_trials: int,
    seed: int,
    stream: int,
    desc: str = "Running trials",
) -> list[T]:
    """Run `trial(rng_seed, index)` for every index, in parallel, in index order.

    Each trial gets its own seed derived from (seed, stream, index), so the
    results do not depend on the worker count or on completion order.
    """
    seeds = [trial_seed(seed, stream, index) for index in range(n_trials)]
    workers = min(worker_count(), max(1, n_trials))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(
            tqdm(
                pool.map(trial, seeds, range(n_trials)),
                total=n_trials,
                desc=f"🔍 {desc}",
                ncols=100,
                colour="green",
                leave=False,
            )
        )
    return results


def run_experiment(config: ExperimentConfig) -> tuple[RunSummary, ExperimentResult]:
    """Dispatch to the named experiment and wrap its outcome in a RunSummary"""
    from collapsim.experiments import EXPERIMENTS

    experiment = EXPERIMENTS[config.experiment]
    summary = RunSummary(
        experiment=config.experiment,
        seed=config.seed,
        trials=config.trials,
        config=config.model_dump(exclude={"output_path"}),
        version=__version__,
    )
    result = ExperimentResult()
    start = time.perf_counter()
    try:
        logger.info("Running experiment {}: {}", experiment.name, experiment.description)
        result = experiment.runner(config)
        summary.metrics = result.metrics
        summary.passed = result.passed
    except Exception as e:
        logger.error("Experiment {} failed: {}", experiment.name, e)
        summary.error = {"type": type(e).__name__, "message": str(e)}
        summary.passed = False
    logger.info("Experiment {} took {:.2f}s", experiment.name, time.perf_counter() - start)
    summary.run = {"timestamp": datetime.now().isoformat()}
    return summary, result

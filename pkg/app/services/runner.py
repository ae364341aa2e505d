"""Experiment execution: per-task random streams, ordered worker pool, run bookkeeping"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, TypeVar
import logging
import time

import numpy as np
import scipy

from app.config import settings
from app.models.schemas import ExperimentConfig, ExperimentRecord, FitResult, RunSummary
from app.services.monitoring import log_event, log_metric
from app.services.results_storage import results_service

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

VERSION = "1.0.0"
LOG_CONVENTION = "natural"
AREA_MEASURE = "dA = dx dy / pi"


def task_rng(seed: int, task_index: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, task index); independent of scheduling"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(task_index)])))


def run_tasks(fn: Callable[[T], R], tasks: Iterable[T], jobs: int = 1) -> List[R]:
    """fn over tasks, results in task order; a process pool when jobs > 1"""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def collect_fits(records: List[ExperimentRecord]) -> Dict[str, FitResult]:
    fits = {}
    for record in records:
        if record.fit_slope is None:
            continue
        model = record.extras.get("model", "fit")
        fits[f"{record.experiment}.{model}"] = FitResult(
            model=model, slope=record.fit_slope, constant=record.fit_const, r2=record.r2
        )
    return fits


def exit_status(violations: int, non_converged: int) -> int:
    """0 clean, 2 bound violation, 3 quadrature non-convergence"""
    if violations:
        return 2
    if non_converged:
        return 3
    return 0


def run_metadata(config: ExperimentConfig, jobs: int) -> Dict[str, object]:
    return {
        "app": settings.APP_NAME,
        "version": VERSION,
        "log": LOG_CONVENTION,
        "area_measure": AREA_MEASURE,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "jobs": jobs,
        "config": config.model_dump(mode="json"),
    }


def run_experiment(config: ExperimentConfig, jobs: Optional[int] = None) -> RunSummary:
    """
    Execute one configured experiment and persist its outputs

    Args:
        config: Validated experiment configuration
        jobs: Worker count; falls back to config.jobs, then LAB_JOBS

    Returns:
        RunSummary with records, fits, counts and exit status
    """
    from app.services.experiments import EXPERIMENTS

    jobs = jobs or config.jobs or settings.LAB_JOBS
    entry = EXPERIMENTS[config.experiment]
    log_event("experiment_started", {"experiment": config.experiment, "jobs": jobs})

    start = time.perf_counter()
    records = entry.driver(config.parameters, jobs)
    wall_ms = (time.perf_counter() - start) * 1000

    violations = sum(1 for r in records if r.violation)
    non_converged = sum(1 for r in records if not r.converged)
    summary = RunSummary(
        experiment=config.experiment,
        parameters=config.parameters.model_dump(mode="json"),
        records=records,
        fits=collect_fits(records),
        violations=violations,
        non_converged=non_converged,
        exit_code=exit_status(violations, non_converged),
        metadata=run_metadata(config, jobs),
        wall_ms=wall_ms,
    )

    log_metric("experiment_wall_ms", wall_ms, {"experiment": config.experiment, "records": len(records)})
    if violations:
        logger.error(f"{config.experiment}: {violations} bound violation(s)")
    if non_converged:
        logger.warning(f"{config.experiment}: {non_converged} record(s) with non-converged quadrature")

    if config.output.csv:
        results_service.save_records(records, config.output.csv)
    if config.output.summary:
        results_service.save_summary(summary, config.output.summary)
    log_event("experiment_finished", {"experiment": config.experiment, "exit_code": summary.exit_code})
    return summary

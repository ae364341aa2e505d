"""Experiment endpoints"""

from fastapi import APIRouter, HTTPException, BackgroundTasks
from pydantic import ValidationError
from typing import List, Optional
import uuid
import logging

from app.core.errors import LabError
from app.models.schemas import (
    ExperimentConfig,
    ExperimentInfo,
    ExperimentParameters,
    RunSummary,
    SelftestRow,
)
from app.services.experiments import EXPERIMENTS, selftest
from app.services.monitoring import log_event
from app.services.results_storage import results_service
from app.services.runner import run_experiment

router = APIRouter()
logger = logging.getLogger(__name__)


def save_run_summary(run_id: str, summary: RunSummary):
    """Background task to keep every served run in the results directory"""
    results_service.save_summary(summary, f"{summary.experiment}-{run_id}.json")


@router.get("/experiments", response_model=List[ExperimentInfo])
async def list_experiments():
    """
    Available experiments

    Returns each experiment's name, description and whether it draws random numbers
    """
    return [
        ExperimentInfo(name=entry.name, description=entry.description, randomized=entry.randomized)
        for entry in EXPERIMENTS.values()
    ]


@router.post("/experiments/{name}", response_model=RunSummary)
def run_named_experiment(
    name: str,
    parameters: ExperimentParameters,
    background_tasks: BackgroundTasks,
    jobs: Optional[int] = None,
):
    """
    Run one experiment

    - **name**: experiment name, see GET /api/v1/experiments
    - **parameters**: degree grid, exponents, domain, family, seed, tolerances
    - **jobs**: worker processes (default LAB_JOBS)

    Returns the records, fits, violation counts and exit status of the run
    """
    if name not in EXPERIMENTS:
        raise HTTPException(status_code=404, detail=f"unknown experiment '{name}'")
    run_id = str(uuid.uuid4())

    try:
        config = ExperimentConfig.model_validate(
            {"experiment": name, "parameters": parameters.model_dump(), "jobs": jobs}
        )
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=str(e))

    log_event("experiment_request", {"run_id": run_id, "experiment": name, "seed": parameters.seed})
    try:
        summary = run_experiment(config)
    except (LabError, ValueError) as e:
        logger.warning(f"{name} rejected: {str(e)}")
        raise HTTPException(status_code=422, detail=str(e))

    background_tasks.add_task(save_run_summary, run_id, summary)
    return summary


@router.get("/selftest", response_model=List[SelftestRow])
def run_selftest():
    """
    Quadrature oracle table

    Every row compares a computed integral with its closed form
    """
    rows = selftest()
    failed = [row.name for row in rows if not row.passed]
    if failed:
        logger.error(f"Self-test failures: {', '.join(failed)}")
    return rows

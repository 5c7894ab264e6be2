"""Evaluation run endpoints."""

import logging
from functools import lru_cache

from fastapi import APIRouter, BackgroundTasks, Depends, HTTPException, status
from fastapi.responses import JSONResponse

from api.database import Database
from api.models import RunKind, RunListResponse, RunRequest, RunResponse, RunStatus
from api.settings import settings
from camobench.attributes.classify import classify_dataset
from camobench.errors import CamoBenchError, InvalidConfig
from camobench.harness.evaluate import attribute_report, eval_fix, eval_rank, eval_seg
from camobench.harness.report import EvaluationReport
from camobench.harness.storage import FileReportStorage, ReportStorageBackend
from camobench.models import BenchConfig, DatasetManifest

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/v1/runs", tags=["runs"])

_EVALUATORS = {RunKind.SEG: eval_seg, RunKind.FIX: eval_fix, RunKind.RANK: eval_rank}


@lru_cache
def get_database() -> Database:
    return Database(settings.database_url)


@lru_cache
def get_report_storage() -> ReportStorageBackend:
    return FileReportStorage(settings.report_dir)


def evaluate_run(
    kind: RunKind,
    manifest: DatasetManifest,
    pred_roots: dict[str, str],
    config: BenchConfig,
    seed: int,
) -> EvaluationReport:
    """Run one evaluation in-process and return its report."""
    if kind is RunKind.ATTRS:
        result = classify_dataset(manifest, config.attributes, jobs=settings.jobs)
        return attribute_report(manifest, result, config, seed=seed)
    return _EVALUATORS[kind](manifest, pred_roots, config, seed=seed, jobs=settings.jobs)


def run_evaluation(
    run_id: int,
    request: RunRequest,
    manifest: DatasetManifest,
    config: BenchConfig,
    database: Database,
    storage: ReportStorageBackend,
) -> None:
    """Background task to execute a run and store its report.

    Args:
        run_id: Run identifier
        request: Original run request
        manifest: Loaded dataset manifest
        config: Validated benchmark config
        database: Database instance
        storage: Report storage backend
    """
    database.update_run_status(run_id, RunStatus.RUNNING)
    try:
        report = evaluate_run(request.kind, manifest, request.pred_roots, config, request.seed)
        report_id = f"run-{run_id}"
        storage.save(report_id, report)
    except CamoBenchError as e:
        logger.warning("run %d failed: %s: %s", run_id, e.kind, e)
        database.update_run_status(run_id, RunStatus.FAILED, error_message=f"{e.kind}: {e}")
        return
    except Exception as e:
        logger.exception("run %d crashed", run_id)
        database.update_run_status(run_id, RunStatus.FAILED, error_message=str(e))
        return
    database.update_run_status(run_id, RunStatus.SUCCEEDED, report_id=report_id)
    logger.info("run %d stored report %s (%d errored rows)", run_id, report_id, len(report.errors))


@router.post(
    "",
    response_model=RunResponse,
    status_code=status.HTTP_202_ACCEPTED,
    summary="Start an evaluation run",
    description="Validate the manifest and config, then evaluate in the background.",
)
async def create_run(
    request: RunRequest,
    background_tasks: BackgroundTasks,
    database: Database = Depends(get_database),
    storage: ReportStorageBackend = Depends(get_report_storage),
) -> RunResponse:
    """Start an evaluation run.

    Args:
        request: Run parameters
        background_tasks: FastAPI background tasks
        database: Run database
        storage: Report storage

    Returns:
        The pending run

    Raises:
        HTTPException: 400 if the manifest is unreadable, 422 if the config is invalid
    """
    try:
        manifest = DatasetManifest.load(request.manifest)
    except CamoBenchError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST, detail=f"{e.kind}: {e}"
        ) from e
    try:
        config = BenchConfig.model_validate(request.config or {})
    except ValueError as e:
        error = InvalidConfig(f"Invalid config: {e}")
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=f"{error.kind}: {error}"
        ) from e

    record = database.create_run(request.kind, manifest.dataset, request.manifest)
    background_tasks.add_task(run_evaluation, record.id, request, manifest, config, database, storage)
    return RunResponse.model_validate(record)


@router.get("", response_model=RunListResponse, summary="List evaluation runs")
async def list_runs(database: Database = Depends(get_database)) -> RunListResponse:
    runs = [RunResponse.model_validate(r) for r in database.list_runs()]
    return RunListResponse(runs=runs, total=len(runs))


def _get_run_or_404(database: Database, run_id: int):
    record = database.get_run(run_id)
    if record is None:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND, detail=f"Run {run_id} not found"
        )
    return record


@router.get("/{run_id}", response_model=RunResponse, summary="Get run status")
async def get_run(run_id: int, database: Database = Depends(get_database)) -> RunResponse:
    return RunResponse.model_validate(_get_run_or_404(database, run_id))


@router.get("/{run_id}/report", summary="Get the report of a finished run")
async def get_run_report(
    run_id: int,
    database: Database = Depends(get_database),
    storage: ReportStorageBackend = Depends(get_report_storage),
) -> JSONResponse:
    """Return the stored JSON report.

    Raises:
        HTTPException: 404 if the run or its report is unknown, 409 while the run has not succeeded
    """
    record = _get_run_or_404(database, run_id)
    if record.status is not RunStatus.SUCCEEDED:
        raise HTTPException(
            status_code=status.HTTP_409_CONFLICT,
            detail=f"Run {run_id} is {record.status.value}",
        )
    report = storage.get(record.report_id) if record.report_id else None
    if report is None:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND, detail=f"Report for run {run_id} not found"
        )
    return JSONResponse(content=report.model_dump(mode="json"))


@router.delete(
    "/{run_id}/report",
    status_code=status.HTTP_204_NO_CONTENT,
    summary="Delete the report of a run",
)
async def delete_run_report(
    run_id: int,
    database: Database = Depends(get_database),
    storage: ReportStorageBackend = Depends(get_report_storage),
) -> None:
    record = _get_run_or_404(database, run_id)
    if not record.report_id or not storage.delete(record.report_id):
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND, detail=f"Report for run {run_id} not found"
        )
    database.clear_report(run_id)

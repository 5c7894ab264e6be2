"""Pydantic models for API requests and responses."""

from datetime import datetime
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field


class RunKind(str, Enum):
    """Which evaluation a run performs."""

    SEG = "seg"
    FIX = "fix"
    RANK = "rank"
    ATTRS = "attrs"


class RunStatus(str, Enum):
    """Status of an evaluation run."""

    PENDING = "pending"
    RUNNING = "running"
    SUCCEEDED = "succeeded"
    FAILED = "failed"


class RunRequest(BaseModel):
    """Request to start an evaluation run."""

    kind: RunKind = Field(..., description="Evaluation to run")
    manifest: str = Field(..., description="Path of the dataset manifest JSON on the server")
    pred_roots: dict[str, str] = Field(
        default_factory=dict,
        description="Prediction root per method; empty uses the manifest's predictions block",
    )
    seed: int = Field(default=0, description="Run seed for the AUC samplers and Corr")
    config: Optional[dict[str, Any]] = Field(
        default=None, description="Inline benchmark config document"
    )


class RunResponse(BaseModel):
    """Evaluation run as stored in the database."""

    model_config = ConfigDict(from_attributes=True)

    id: int
    kind: RunKind
    dataset: str
    status: RunStatus
    manifest: str
    report_id: Optional[str] = None
    error_message: Optional[str] = None
    created_at: datetime
    updated_at: datetime


class RunListResponse(BaseModel):
    runs: list[RunResponse]
    total: int

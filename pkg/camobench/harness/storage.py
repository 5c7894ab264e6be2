"""Evaluation report storage.

Reports are stored as JSON documents keyed by run id. The abstract interface
leaves room for object-store backends.
"""

import json
import logging
import re
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Optional

from camobench.errors import UnwritablePath
from camobench.harness.report import EvaluationReport, render_json

logger = logging.getLogger(__name__)

_REPORT_ID = re.compile(r"^[A-Za-z0-9_.-]+$")


class ReportStorageBackend(ABC):
    """Abstract base class for report storage backends."""

    @abstractmethod
    def save(self, report_id: str, report: EvaluationReport) -> None:
        """Store a report, replacing any previous one under the same id."""

    @abstractmethod
    def get(self, report_id: str) -> Optional[EvaluationReport]:
        """Return the report or None if not found."""

    @abstractmethod
    def delete(self, report_id: str) -> bool:
        """Return True if deleted, False if not found."""

    @abstractmethod
    def list_all(self) -> list[str]:
        """Ids of all stored reports, sorted."""

    @abstractmethod
    def exists(self, report_id: str) -> bool:
        pass


class FileReportStorage(ReportStorageBackend):
    """Stores reports in ``{base_path}/{report_id}.json``."""

    def __init__(self, base_path: str | Path = "reports") -> None:
        self.base_path = Path(base_path)
        self.base_path.mkdir(parents=True, exist_ok=True)

    def _get_report_path(self, report_id: str) -> Path:
        if not _REPORT_ID.match(report_id):
            raise ValueError(f"invalid report id '{report_id}'")
        return self.base_path / f"{report_id}.json"

    def save(self, report_id: str, report: EvaluationReport) -> None:
        path = self._get_report_path(report_id)
        try:
            path.write_text(render_json(report))
        except OSError as e:
            raise UnwritablePath(f"cannot write {path}: {e}", path=str(path)) from e

    def get(self, report_id: str) -> Optional[EvaluationReport]:
        path = self._get_report_path(report_id)
        if not path.exists():
            return None
        return EvaluationReport.model_validate(json.loads(path.read_text()))

    def delete(self, report_id: str) -> bool:
        path = self._get_report_path(report_id)
        if not path.exists():
            return False
        path.unlink()
        return True

    def list_all(self) -> list[str]:
        ids = []
        for report_file in sorted(self.base_path.glob("*.json")):
            try:
                json.loads(report_file.read_text())
            except (json.JSONDecodeError, OSError):
                logger.warning("skipping unreadable report %s", report_file)
                continue
            ids.append(report_file.stem)
        return ids

    def exists(self, report_id: str) -> bool:
        return self._get_report_path(report_id).exists()

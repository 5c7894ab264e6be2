"""SQLite database for tracking evaluation runs."""

from datetime import datetime, timezone
from typing import Optional

from sqlalchemy import DateTime, Enum, Integer, String, Text, create_engine
from sqlalchemy.orm import DeclarativeBase, Mapped, Session, mapped_column, sessionmaker

from api.models import RunKind, RunStatus


def _now() -> datetime:
    return datetime.now(timezone.utc)


class Base(DeclarativeBase):
    """Base class for SQLAlchemy models."""

    pass


class RunRecord(Base):
    """Database model for evaluation runs."""

    __tablename__ = "evaluation_runs"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    kind: Mapped[RunKind] = mapped_column(Enum(RunKind), nullable=False)
    dataset: Mapped[str] = mapped_column(String(100), nullable=False, index=True)
    status: Mapped[RunStatus] = mapped_column(
        Enum(RunStatus), nullable=False, default=RunStatus.PENDING
    )
    manifest: Mapped[str] = mapped_column(Text, nullable=False)
    report_id: Mapped[Optional[str]] = mapped_column(String(100), nullable=True)
    error_message: Mapped[Optional[str]] = mapped_column(Text, nullable=True)
    created_at: Mapped[datetime] = mapped_column(DateTime, nullable=False, default=_now)
    updated_at: Mapped[datetime] = mapped_column(
        DateTime, nullable=False, default=_now, onupdate=_now
    )


class Database:
    """Database connection and operations."""

    def __init__(self, database_url: str = "sqlite:///./camobench_runs.db"):
        """Initialize database connection.

        Args:
            database_url: SQLAlchemy database URL. Defaults to local SQLite.
        """
        # background tasks run on worker threads
        connect_args = {"check_same_thread": False} if database_url.startswith("sqlite") else {}
        self.engine = create_engine(database_url, echo=False, connect_args=connect_args)
        self.SessionLocal = sessionmaker(bind=self.engine)
        Base.metadata.create_all(self.engine)

    def get_session(self) -> Session:
        """Get a new database session."""
        return self.SessionLocal()

    def create_run(self, kind: RunKind, dataset: str, manifest: str) -> RunRecord:
        """Create a pending run record.

        Args:
            kind: Evaluation kind
            dataset: Dataset name from the manifest
            manifest: Manifest path as submitted

        Returns:
            Created run record
        """
        with self.get_session() as session:
            record = RunRecord(
                kind=kind,
                dataset=dataset,
                manifest=manifest,
                status=RunStatus.PENDING,
            )
            session.add(record)
            session.commit()
            session.refresh(record)
            return record

    def get_run(self, run_id: int) -> Optional[RunRecord]:
        with self.get_session() as session:
            return session.get(RunRecord, run_id)

    def update_run_status(
        self,
        run_id: int,
        status: RunStatus,
        report_id: Optional[str] = None,
        error_message: Optional[str] = None,
    ) -> Optional[RunRecord]:
        """Update run status.

        Args:
            run_id: Run identifier
            status: New run status
            report_id: Storage id of the finished report
            error_message: Error message if failed

        Returns:
            Updated run record or None if not found
        """
        with self.get_session() as session:
            record = session.get(RunRecord, run_id)
            if not record:
                return None

            record.status = status
            record.updated_at = _now()
            if report_id:
                record.report_id = report_id
            if error_message:
                record.error_message = error_message

            session.commit()
            session.refresh(record)
            return record

    def clear_report(self, run_id: int) -> Optional[RunRecord]:
        with self.get_session() as session:
            record = session.get(RunRecord, run_id)
            if not record:
                return None
            record.report_id = None
            record.updated_at = _now()
            session.commit()
            session.refresh(record)
            return record

    def list_runs(self) -> list[RunRecord]:
        """All runs, oldest first."""
        with self.get_session() as session:
            return list(session.query(RunRecord).order_by(RunRecord.id).all())

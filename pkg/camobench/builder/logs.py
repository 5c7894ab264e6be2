"""Fixation-log and delay-table CSV formats.

Fixation log, one file per observer per image::

    observer_id,image_id,t0_ms      <- optional column-name row
    obs1,img_0001,1000              <- session metadata
    t_ms,x,y                        <- optional column-name row
    1200,34,80
    ...
"""

import csv
import logging
from pathlib import Path
from typing import Iterable, Optional

from pydantic import ValidationError

from camobench.core.maps import Dims
from camobench.errors import FileMissing, ManifestError, UnwritablePath
from camobench.models import DelayRecord, FixationEvent, FixationSession

logger = logging.getLogger(__name__)

SESSION_HEADER = ["observer_id", "image_id", "t0_ms"]
EVENT_HEADER = ["t_ms", "x", "y"]
DELAY_HEADER = ["image_id", "instance_id", "delay_ms", "normalized", "rank", "failure_forced"]


def read_fixation_log(path: str | Path, dims: Optional[Dims] = None) -> FixationSession:
    path = Path(path)
    if not path.is_file():
        raise FileMissing(f"{path} does not exist", path=str(path))
    with path.open(newline="") as f:
        rows = [[cell.strip() for cell in row] for row in csv.reader(f) if any(c.strip() for c in row)]

    if rows and [c.lower() for c in rows[0]] == SESSION_HEADER:
        rows = rows[1:]
    if not rows or len(rows[0]) != 3:
        raise ManifestError(f"{path}: missing observer_id,image_id,t0_ms line", path=str(path))
    observer_id, image_id, t0 = rows[0]
    rows = rows[1:]
    if rows and [c.lower() for c in rows[0]] == EVENT_HEADER:
        rows = rows[1:]

    try:
        events = sorted(
            (FixationEvent(timestamp_ms=int(t), x=int(x), y=int(y)) for t, x, y in rows),
            key=lambda e: e.timestamp_ms,
        )
        return FixationSession(
            image_id=image_id,
            observer_id=observer_id,
            t0_ms=int(t0),
            events=tuple(events),
            width=dims[0] if dims else None,
            height=dims[1] if dims else None,
        )
    except (ValueError, ValidationError) as e:
        raise ManifestError(f"{path}: malformed fixation log: {e}", path=str(path)) from e


def write_fixation_log(session: FixationSession, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(SESSION_HEADER)
            writer.writerow([session.observer_id, session.image_id, session.t0_ms])
            writer.writerow(EVENT_HEADER)
            for e in session.events:
                writer.writerow([e.timestamp_ms, e.x, e.y])
    except OSError as e:
        raise UnwritablePath(f"cannot write {path}: {e}", path=str(path)) from e
    return path


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_delay_table(records: Iterable[DelayRecord], path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(DELAY_HEADER)
            for r in records:
                writer.writerow(
                    [
                        r.image_id,
                        r.instance_id,
                        _fmt(r.delay_ms),
                        _fmt(r.normalized),
                        r.rank.name if r.rank is not None else "",
                        "true" if r.failure_forced else "false",
                    ]
                )
    except OSError as e:
        raise UnwritablePath(f"cannot write {path}: {e}", path=str(path)) from e
    return path


def read_delay_table(path: str | Path) -> list[DelayRecord]:
    path = Path(path)
    if not path.is_file():
        raise FileMissing(f"{path} does not exist", path=str(path))
    with path.open(newline="") as f:
        return [
            DelayRecord(
                image_id=row["image_id"],
                instance_id=row["instance_id"],
                delay_ms=float(row["delay_ms"]) if row["delay_ms"] else None,
                normalized=float(row["normalized"]) if row["normalized"] else None,
                rank=row["rank"] or None,
                failure_forced=row["failure_forced"] == "true",
            )
            for row in csv.DictReader(f)
        ]

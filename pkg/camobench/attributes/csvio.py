"""Attribute table CSV: one row per instance, Unknown as an empty field."""

import csv
from pathlib import Path
from typing import Iterable, Optional

from camobench.attributes.classify import AttributeFlags
from camobench.errors import FileMissing, ManifestError, UnwritablePath

ATTRIBUTE_HEADER = [
    "image_id",
    "instance_id",
    "BM",
    "CB",
    "CP",
    "DC",
    "MM",
    "OC",
    "SA",
    "SO",
    "bm_score",
    "cb_score",
    "gabrat",
]

_FLAG_COLUMNS = ATTRIBUTE_HEADER[2:10]
_SCORE_COLUMNS = ATTRIBUTE_HEADER[10:]


def _fmt(value: Optional[bool | float]) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(float(value))


def _parse_flag(value: str) -> Optional[bool]:
    value = value.strip().lower()
    if not value:
        return None
    if value in ("true", "1"):
        return True
    if value in ("false", "0"):
        return False
    raise ValueError(f"not a flag: {value!r}")


def write_attribute_csv(flags: Iterable[AttributeFlags], path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(ATTRIBUTE_HEADER)
            for row in flags:
                writer.writerow(
                    [row.image_id, row.instance_id]
                    + [_fmt(getattr(row, col)) for col in ATTRIBUTE_HEADER[2:]]
                )
    except OSError as e:
        raise UnwritablePath(f"cannot write {path}: {e}", path=str(path)) from e
    return path


def load_attribute_csv(path: str | Path) -> list[AttributeFlags]:
    path = Path(path)
    if not path.is_file():
        raise FileMissing(f"{path} does not exist", path=str(path))
    rows = []
    with path.open(newline="") as f:
        for line, raw in enumerate(csv.DictReader(f), start=2):
            try:
                values: dict[str, object] = {
                    "image_id": raw["image_id"],
                    "instance_id": raw["instance_id"],
                }
                for col in _FLAG_COLUMNS:
                    values[col] = _parse_flag(raw.get(col) or "")
                for col in _SCORE_COLUMNS:
                    cell = (raw.get(col) or "").strip()
                    values[col] = float(cell) if cell else None
                rows.append(AttributeFlags.model_validate(values))
            except (KeyError, ValueError) as e:
                raise ManifestError(f"{path}:{line}: malformed attribute row: {e}", path=str(path)) from e
    return rows

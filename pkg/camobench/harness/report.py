"""Evaluation report model and its CSV / JSON / Markdown emission.

Emission is byte-deterministic for a given report: no timestamps, sorted JSON
keys, rows in manifest order.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from camobench import __version__
from camobench.errors import UnwritablePath
from camobench.models import BenchConfig, ErrorNote

logger = logging.getLogger(__name__)

REPORT_FORMATS: tuple[str, ...] = ("csv", "json", "md")
CSV_HEADER = [
    "image_id",
    "instance_id",
    "method",
    "metric",
    "value",
    "operation",
    "kind",
    "path",
    "message",
]


class MetricRow(BaseModel):
    image_id: str
    method: str
    metric: str
    value: float
    instance_id: Optional[str] = None


class AggregateRow(BaseModel):
    method: str
    metric: str
    mean: float
    count: int


class DatasetRow(BaseModel):
    """A metric defined on the whole dataset (Corr, rank penalty)."""

    method: str
    metric: str
    value: float
    details: dict[str, Any] = Field(default_factory=dict)


class EvaluationReport(BaseModel):
    kind: str
    dataset: str
    methods: list[str] = Field(default_factory=list)
    metrics: list[str] = Field(default_factory=list)
    rows: list[MetricRow] = Field(default_factory=list)
    errors: list[ErrorNote] = Field(default_factory=list)
    aggregates: list[AggregateRow] = Field(default_factory=list)
    dataset_rows: list[DatasetRow] = Field(default_factory=list)
    metadata: dict[str, Any] = Field(default_factory=dict)

    @property
    def has_errors(self) -> bool:
        return bool(self.errors)

    def values(self, method: str, metric: str) -> list[float]:
        return [r.value for r in self.rows if r.method == method and r.metric == metric]

    def aggregate(self, method: str, metric: str) -> Optional[AggregateRow]:
        return next(
            (a for a in self.aggregates if a.method == method and a.metric == metric), None
        )

    @classmethod
    def load(cls, path: str | Path) -> "EvaluationReport":
        return cls.model_validate_json(Path(path).read_text())


def compute_aggregates(
    rows: Sequence[MetricRow], methods: Sequence[str], metrics: Sequence[str]
) -> list[AggregateRow]:
    """Mean of the non-error rows per (method, metric), summed in row order."""
    grouped: dict[tuple[str, str], list[float]] = {}
    for row in rows:
        grouped.setdefault((row.method, row.metric), []).append(row.value)
    aggregates = []
    for method in methods:
        for metric in metrics:
            values = grouped.get((method, metric))
            if values:
                aggregates.append(
                    AggregateRow(
                        method=method,
                        metric=metric,
                        mean=float(np.mean(values)),
                        count=len(values),
                    )
                )
    return aggregates


def report_metadata(config: BenchConfig, seed: int, kind: str) -> dict[str, Any]:
    """Every convention and threshold a reader needs to interpret the numbers."""
    metrics = config.metrics
    attributes = config.attributes
    return {
        "tool": "camobench",
        "version": __version__,
        "kind": kind,
        "seed": seed,
        "seeds": {
            "run": seed,
            "corr": config.match.seed if config.match.seed is not None else seed,
            "derivation": "default_rng([run, image_index, method_index, stream])",
        },
        "conventions": {
            "f_threshold_policy": metrics.f_threshold_policy,
            "f_beta_squared": 0.3,
            "s_measure_alpha": 0.5,
            "e_measure": "adaptive-2mean",
            "emd_grid": metrics.emd_grid,
            "emd_units": "pixel" if metrics.emd_pixel_units else "cell",
            "kld_eps": metrics.kld_eps,
            "auc_splits": metrics.auc_splits,
            "aggregation": "mean over images",
            "penalty_matrix": config.penalty_matrix or "linear",
            "attention": "literal" if config.attention.literal else "prose",
        },
        "thresholds": {
            "iou": config.match.iou_threshold,
            "bm": attributes.bm_threshold,
            "cb": attributes.cb_threshold,
            "cp_sigma": attributes.cp_sigma,
            "dc": attributes.dc_threshold,
            "so": attributes.so_threshold,
        },
        "cp_direction": attributes.cp_direction.value,
        "cb_measure": attributes.cb_measure,
        "config": config.model_dump(mode="json"),
    }


# -----------------------------------------------------------------------------
# Emission
# -----------------------------------------------------------------------------


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def render_csv(report: EvaluationReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        writer.writerow(
            [row.image_id, row.instance_id or "", row.method, row.metric, _fmt(row.value)]
            + [""] * 4
        )
    for note in report.errors:
        writer.writerow(
            [
                note.image_id or "",
                "",
                note.method or "",
                note.metric or "",
                "",
                note.operation,
                note.kind,
                note.path or "",
                note.message,
            ]
        )
    return buffer.getvalue()


def render_json(report: EvaluationReport) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def _md_cell(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4f}"


def render_markdown(report: EvaluationReport) -> str:
    """One row per method, one column per metric (dataset-level metrics last)."""
    dataset_metrics: list[str] = []
    for row in report.dataset_rows:
        if row.metric not in dataset_metrics:
            dataset_metrics.append(row.metric)
    columns = list(report.metrics) + dataset_metrics
    lines = [
        f"# {report.dataset} ({report.kind})",
        "",
        "| Method | " + " | ".join(columns) + " |",
        "|---" * (len(columns) + 1) + "|",
    ]
    for method in report.methods:
        cells = []
        for metric in report.metrics:
            agg = report.aggregate(method, metric)
            cells.append(_md_cell(agg.mean if agg else None))
        for metric in dataset_metrics:
            row = next(
                (r for r in report.dataset_rows if r.method == method and r.metric == metric),
                None,
            )
            cells.append(_md_cell(row.value if row else None))
        lines.append(f"| {method} | " + " | ".join(cells) + " |")
    if report.errors:
        lines += ["", f"{len(report.errors)} errored rows (see CSV/JSON)."]
    return "\n".join(lines) + "\n"


_RENDERERS = {"csv": render_csv, "json": render_json, "md": render_markdown}


def write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as f:
            f.write(text)
    except OSError as e:
        raise UnwritablePath(f"cannot write {path}: {e}", path=str(path)) from e
    return path


def emit_report(
    report: EvaluationReport,
    out_dir: str | Path,
    formats: Iterable[str] = REPORT_FORMATS,
    stem: str = "report",
) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    for fmt in formats:
        renderer = _RENDERERS.get(fmt)
        if renderer is None:
            raise ValueError(f"unknown report format '{fmt}'; choose from {list(REPORT_FORMATS)}")
        written.append(write_text(out_dir / f"{stem}.{fmt}", renderer(report)))
    logger.info("wrote %s", ", ".join(str(p) for p in written))
    return written

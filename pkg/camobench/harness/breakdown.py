"""Per-attribute performance breakdown and the attribute x rank histogram."""

import csv
import io
import logging
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from camobench.attributes.classify import ATTRIBUTE_NAMES, AttributeFlags
from camobench.harness.report import EvaluationReport, write_text
from camobench.models import FOREGROUND_RANKS, RankLabel

logger = logging.getLogger(__name__)

DISPLAY_FLOOR = 0.7


class BreakdownRow(BaseModel):
    attribute: str
    method: str
    metric: str
    mean: float
    count: int


class AttributeBreakdown(BaseModel):
    dataset: str
    rows: list[BreakdownRow] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)


def images_by_attribute(flags: Iterable[AttributeFlags]) -> dict[str, set[str]]:
    """Image ids carrying each attribute; an image carries it if any instance does."""
    groups: dict[str, set[str]] = {name: set() for name in ATTRIBUTE_NAMES}
    for row in flags:
        for name in ATTRIBUTE_NAMES:
            if row.carries(name):
                groups[name].add(row.image_id)
    return groups


def attr_breakdown(report: EvaluationReport, flags: Sequence[AttributeFlags]) -> AttributeBreakdown:
    """Mean of every (method, metric) over the images carrying each attribute.

    Values are raw; attributes with no images are omitted and noted.
    """
    groups = images_by_attribute(flags)
    breakdown = AttributeBreakdown(dataset=report.dataset)
    for attribute in ATTRIBUTE_NAMES:
        members = groups[attribute]
        if not members:
            breakdown.notes.append(f"attribute {attribute} has no images; omitted")
            continue
        for method in report.methods:
            for metric in report.metrics:
                values = [
                    r.value
                    for r in report.rows
                    if r.method == method and r.metric == metric and r.image_id in members
                ]
                if values:
                    breakdown.rows.append(
                        BreakdownRow(
                            attribute=attribute,
                            method=method,
                            metric=metric,
                            mean=float(np.mean(values)),
                            count=len(values),
                        )
                    )
    return breakdown


def display_offsets(breakdown: AttributeBreakdown) -> dict[tuple[str, str], float]:
    """Per (attribute, metric): a 0.1-step shift placing the smallest mean in [0.70, 0.80)."""
    smallest: dict[tuple[str, str], float] = {}
    for row in breakdown.rows:
        key = (row.attribute, row.metric)
        smallest[key] = min(smallest.get(key, math.inf), row.mean)
    return {
        key: round(DISPLAY_FLOOR - math.floor(round(low * 10, 9)) / 10, 1)
        for key, low in smallest.items()
    }


def render_breakdown_csv(breakdown: AttributeBreakdown) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["attribute", "method", "metric", "mean", "count"])
    for row in breakdown.rows:
        writer.writerow([row.attribute, row.method, row.metric, repr(row.mean), row.count])
    return buffer.getvalue()


def render_breakdown_markdown(breakdown: AttributeBreakdown, display_offset: bool = False) -> str:
    offsets = display_offsets(breakdown) if display_offset else {}
    methods: list[str] = []
    metrics: list[str] = []
    for row in breakdown.rows:
        if row.method not in methods:
            methods.append(row.method)
        if row.metric not in metrics:
            metrics.append(row.metric)
    lines = [f"# {breakdown.dataset} by attribute", ""]
    if display_offset:
        lines += ["Values shifted per attribute for display; see CSV for raw means.", ""]
    for metric in metrics:
        present = {r.attribute for r in breakdown.rows if r.metric == metric}
        attributes = [a for a in ATTRIBUTE_NAMES if a in present]
        lines += [f"## {metric}", "", "| Method | " + " | ".join(attributes) + " |"]
        lines.append("|---" * (len(attributes) + 1) + "|")
        for method in methods:
            cells = []
            for attribute in attributes:
                row = next(
                    (
                        r
                        for r in breakdown.rows
                        if r.attribute == attribute and r.method == method and r.metric == metric
                    ),
                    None,
                )
                if row is None:
                    cells.append("-")
                else:
                    cells.append(f"{row.mean + offsets.get((attribute, metric), 0.0):.4f}")
            lines.append(f"| {method} | " + " | ".join(cells) + " |")
        lines.append("")
    for note in breakdown.notes:
        lines.append(f"- {note}")
    return "\n".join(lines).rstrip("\n") + "\n"


def emit_breakdown(
    breakdown: AttributeBreakdown,
    out_dir: str | Path,
    display_offset: bool = False,
    stem: str = "attributes",
) -> list[Path]:
    out_dir = Path(out_dir)
    return [
        write_text(out_dir / f"{stem}.csv", render_breakdown_csv(breakdown)),
        write_text(
            out_dir / f"{stem}.md", render_breakdown_markdown(breakdown, display_offset)
        ),
    ]


# -----------------------------------------------------------------------------
# Rank histogram
# -----------------------------------------------------------------------------


class RankHistogram(BaseModel):
    """Instance counts per (attribute, rank level)."""

    counts: dict[str, dict[str, int]]

    def cell(self, attribute: str, rank: RankLabel | str) -> int:
        return self.counts[attribute][RankLabel.parse(rank).name]


def rank_histogram(
    ranks: Iterable[tuple[str, str, Optional[RankLabel]]],
    flags: Iterable[AttributeFlags],
) -> RankHistogram:
    """Count ranked instances per attribute, joined on (image_id, instance_id)."""
    counts = {a: {r.name: 0 for r in FOREGROUND_RANKS} for a in ATTRIBUTE_NAMES}
    by_key = {(f.image_id, f.instance_id): f for f in flags}
    for image_id, instance_id, rank in ranks:
        if rank is None or rank not in FOREGROUND_RANKS:
            continue
        row = by_key.get((image_id, instance_id))
        if row is None:
            logger.debug("no attribute row for %s/%s", image_id, instance_id)
            continue
        for attribute in ATTRIBUTE_NAMES:
            if row.carries(attribute):
                counts[attribute][rank.name] += 1
    return RankHistogram(counts=counts)


def render_rank_histogram_csv(histogram: RankHistogram) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["attribute"] + [r.name for r in FOREGROUND_RANKS])
    for attribute in ATTRIBUTE_NAMES:
        writer.writerow(
            [attribute] + [histogram.counts[attribute][r.name] for r in FOREGROUND_RANKS]
        )
    return buffer.getvalue()

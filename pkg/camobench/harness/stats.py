"""Dataset summary: object size, object spread from the center, rank counts."""

import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field

from camobench.core.imageio import load_mask
from camobench.core.maps import BinaryMask
from camobench.errors import CamoBenchError, EmptyMask
from camobench.harness.report import write_text
from camobench.models import FOREGROUND_RANKS, DatasetManifest, ErrorNote, ManifestEntry

logger = logging.getLogger(__name__)

HISTOGRAM_BINS = 10


class ImageStats(BaseModel):
    image_id: str
    area_ratio: float
    center_distance: float


class DatasetStats(BaseModel):
    dataset: str
    images: list[ImageStats] = Field(default_factory=list)
    area_histogram: list[int] = Field(default_factory=list)
    center_histogram: list[int] = Field(default_factory=list)
    bin_edges: list[float] = Field(default_factory=list)
    rank_counts: dict[str, int] = Field(default_factory=dict)
    errors: list[ErrorNote] = Field(default_factory=list)


def furthest_center_distance(mask: BinaryMask) -> float:
    """Distance of the furthest foreground pixel center from the image center,
    over the half-diagonal."""
    ys, xs = np.nonzero(mask.bits)
    if xs.size == 0:
        raise EmptyMask("mask has no foreground pixels")
    width, height = mask.dims
    distances = np.hypot(xs + 0.5 - width / 2.0, ys + 0.5 - height / 2.0)
    return float(distances.max() / (np.hypot(width, height) / 2.0))


def _object_mask(entry: ManifestEntry, manifest: DatasetManifest) -> BinaryMask:
    if entry.gt_mask is not None:
        return load_mask(manifest.resolve(entry.gt_mask), entry.dims)
    if not entry.instances:
        raise EmptyMask(f"{entry.image_id}: no gt_mask or instances")
    bits = np.zeros((entry.height, entry.width), dtype=bool)
    for inst in entry.instances:
        bits |= load_mask(manifest.resolve(inst.mask), entry.dims).bits
    return BinaryMask(bits)


def dataset_stats(manifest: DatasetManifest) -> DatasetStats:
    stats = DatasetStats(dataset=manifest.dataset)
    for entry in manifest.entries:
        try:
            mask = _object_mask(entry, manifest)
            stats.images.append(
                ImageStats(
                    image_id=entry.image_id,
                    area_ratio=mask.area / (entry.width * entry.height),
                    center_distance=furthest_center_distance(mask),
                )
            )
        except CamoBenchError as e:
            stats.errors.append(
                ErrorNote.from_exception(e, "dataset_stats", image_id=entry.image_id)
            )

    edges = np.linspace(0.0, 1.0, HISTOGRAM_BINS + 1)
    stats.bin_edges = [float(e) for e in edges]
    stats.area_histogram = [
        int(c) for c in np.histogram([i.area_ratio for i in stats.images], bins=edges)[0]
    ]
    stats.center_histogram = [
        int(c)
        for c in np.histogram(
            np.clip([i.center_distance for i in stats.images], 0.0, 1.0), bins=edges
        )[0]
    ]

    ranks = [inst.rank for entry in manifest.entries for inst in entry.instances]
    if any(r is not None for r in ranks):
        stats.rank_counts = {r.name: sum(1 for x in ranks if x == r) for r in FOREGROUND_RANKS}
    logger.info("summarized %d images (%d errors)", len(stats.images), len(stats.errors))
    return stats


def render_stats_markdown(stats: DatasetStats) -> str:
    edges = stats.bin_edges
    lines = [
        f"# {stats.dataset} statistics",
        "",
        "| Bin | Object area ratio | Furthest distance to center |",
        "|---|---|---|",
    ]
    for i, (area, center) in enumerate(zip(stats.area_histogram, stats.center_histogram)):
        lines.append(f"| [{edges[i]:.1f}, {edges[i + 1]:.1f}) | {area} | {center} |")
    if stats.rank_counts:
        lines += ["", "| Rank | Instances |", "|---|---|"]
        lines += [f"| {name} | {count} |" for name, count in stats.rank_counts.items()]
    return "\n".join(lines) + "\n"


def emit_stats(stats: DatasetStats, out_dir: str | Path, stem: str = "stats") -> list[Path]:
    out_dir = Path(out_dir)
    return [
        write_text(out_dir / f"{stem}.json", stats.model_dump_json(indent=2) + "\n"),
        write_text(out_dir / f"{stem}.md", render_stats_markdown(stats)),
    ]

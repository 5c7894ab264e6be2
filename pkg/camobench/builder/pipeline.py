"""End-to-end dataset construction: logs + instance masks -> delays, ranks, maps."""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from camobench.builder.delays import aggregate_instance_delay, normalize_delays, per_observer_delay
from camobench.builder.logs import read_fixation_log, write_delay_table
from camobench.builder.ranks import assign_ranks, rank_distribution
from camobench.builder.render import render_fixation_map, render_rank_map
from camobench.core.imageio import load_mask, save_rank_map, save_scalar_map
from camobench.core.instances import InstanceRecord
from camobench.errors import AllFailed, CamoBenchError
from camobench.models import (
    BuilderConfig,
    DatasetManifest,
    DelayRecord,
    ErrorNote,
    ManifestEntry,
)
from camobench.parallel import run_ordered

logger = logging.getLogger(__name__)


@dataclass
class BuildResult:
    records: list[DelayRecord]
    errors: list[ErrorNote]
    delay_table: Path
    manifest_path: Path
    rank_counts: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class _ImageTask:
    entry: ManifestEntry
    base_dir: Path
    config: BuilderConfig
    out_dir: Path


@dataclass
class _ImageResult:
    records: list[DelayRecord]
    errors: list[ErrorNote]
    fixation_map: Path | None = None


def _resolve(base_dir: Path, relative: str) -> Path:
    path = Path(relative)
    return path if path.is_absolute() else base_dir / path


def _delays_for_image(task: _ImageTask) -> _ImageResult:
    entry, config = task.entry, task.config
    image_id = entry.image_id
    errors: list[ErrorNote] = []
    try:
        sessions = [
            read_fixation_log(_resolve(task.base_dir, p), entry.dims) for p in entry.fixation_logs
        ]
    except CamoBenchError as e:
        return _ImageResult([], [ErrorNote.from_exception(e, "read_fixation_log", image_id=image_id)])

    records: list[DelayRecord] = []
    for index, instance in enumerate(entry.instances):
        instance_id = str(index)
        path = _resolve(task.base_dir, instance.mask)
        try:
            mask = load_mask(path, entry.dims)
            outcomes = [per_observer_delay(s, mask) for s in sessions]
            records.append(
                aggregate_instance_delay(outcomes, config, image_id=image_id, instance_id=instance_id)
            )
        except CamoBenchError as e:
            errors.append(
                ErrorNote.from_exception(
                    e, "aggregate_instance_delay", image_id=image_id, path=str(path)
                )
            )

    out_path = task.out_dir / "fixations" / f"{image_id}.png"
    try:
        fixation_map = render_fixation_map(
            sessions, entry.dims, config.sigma_for(entry.width), config.truncate
        )
        save_scalar_map(fixation_map, out_path)
    except CamoBenchError as e:
        errors.append(ErrorNote.from_exception(e, "render_fixation_map", image_id=image_id))
        return _ImageResult(records, errors)
    return _ImageResult(records, errors, out_path)


def _relative_to(path: Path, start: Path) -> str:
    return Path(os.path.relpath(path.resolve(), start.resolve())).as_posix()


def build_dataset(
    manifest: DatasetManifest,
    config: BuilderConfig,
    out_dir: str | Path,
    jobs: int = 1,
) -> BuildResult:
    """Run the construction pipeline and write its artifacts under ``out_dir``.

    Per-image work fans out over ``jobs`` processes; normalization and rank
    assignment are global barriers over every record.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [_ImageTask(e, manifest.base_dir, config, out_dir) for e in manifest.entries]
    results = run_ordered(_delays_for_image, tasks, jobs)

    errors = [note for r in results for note in r.errors]
    raw = [rec for r in results for rec in r.records]
    try:
        normalized = normalize_delays(raw, config.normalization)
    except AllFailed as e:
        # failure-forced records already carry normalized delay 1
        errors.append(ErrorNote.from_exception(e, "normalize_delays"))
        normalized = raw
    ranked = assign_ranks(normalized, config)
    by_key = {(r.image_id, r.instance_id): r for r in ranked}
    logger.info("built %d instance records (%d errors)", len(ranked), len(errors))

    entries: list[ManifestEntry] = []
    for entry, result in zip(manifest.entries, results):
        image_id = entry.image_id
        instances = []
        records_for_image = []
        for index, inst in enumerate(entry.instances):
            record = by_key.get((image_id, str(index)))
            rank = record.rank if record is not None else None
            instances.append(
                inst.model_copy(
                    update={"mask": _relative_to(manifest.resolve(inst.mask), out_dir), "rank": rank}
                )
            )
            if record is not None:
                records_for_image.append((index, record, inst))

        if records_for_image and len(records_for_image) == len(entry.instances):
            try:
                masks = [
                    InstanceRecord(
                        instance_id=str(index),
                        mask=load_mask(manifest.resolve(inst.mask), entry.dims),
                        rank=record.rank,
                        source=str(manifest.resolve(inst.mask)),
                    )
                    for index, record, inst in records_for_image
                ]
                save_rank_map(
                    render_rank_map(masks, entry.dims), out_dir / "ranks" / f"{image_id}.png"
                )
            except CamoBenchError as e:
                errors.append(ErrorNote.from_exception(e, "render_rank_map", image_id=image_id))

        update = {
            "image": _relative_to(manifest.resolve(entry.image), out_dir),
            "instances": instances,
            "fixation_logs": [_relative_to(manifest.resolve(p), out_dir) for p in entry.fixation_logs],
        }
        for key in ("gt_mask", "saliency_map", "fixation_points"):
            value = getattr(entry, key)
            if value is not None:
                update[key] = _relative_to(manifest.resolve(value), out_dir)
        if result.fixation_map is not None:
            update["fixation_map"] = _relative_to(result.fixation_map, out_dir)
        entries.append(entry.model_copy(update=update))

    delay_table = write_delay_table(ranked, out_dir / "delays.csv")
    ranked_manifest = DatasetManifest(
        dataset=manifest.dataset,
        entries=entries,
        predictions={
            name: _relative_to(manifest.resolve(root), out_dir)
            for name, root in manifest.predictions.items()
        },
    )
    manifest_path = out_dir / "manifest.ranked.json"
    ranked_manifest.save(manifest_path)
    return BuildResult(
        records=ranked,
        errors=errors,
        delay_table=delay_table,
        manifest_path=manifest_path,
        rank_counts=rank_distribution(ranked),
    )

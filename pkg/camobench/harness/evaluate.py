"""Batch evaluation of method predictions against a dataset manifest.

Per-image work runs through ``run_ordered``; every seeded metric derives its
generator from (run seed, image index, method index, stream), and the reducer
walks results in manifest order, so ``jobs`` never changes a report.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, TypeVar

import numpy as np

from camobench.attributes.classify import ATTRIBUTE_NAMES, AttributeResult
from camobench.builder.logs import read_fixation_log
from camobench.core.fixations import FixationPointSet
from camobench.core.imageio import load_mask, load_scalar_map
from camobench.core.instances import InstanceRecord, paint_rank_map, union_mask
from camobench.core.maps import BinaryMask, Dims, RankMap, ScalarMap, to_distribution
from camobench.errors import (
    CamoBenchError,
    EmptyInput,
    EvaluationAborted,
    FileMissing,
    ManifestError,
)
from camobench.harness.report import (
    DatasetRow,
    EvaluationReport,
    MetricRow,
    compute_aggregates,
    report_metadata,
)
from camobench.metrics.fixation import auc_borji, auc_judd, cc, kld, nss, sauc, sim
from camobench.metrics.ranking import (
    RankedImage,
    build_matched_pool,
    corr,
    r_mae,
    rank_penalty,
    rank_prediction_to_map,
    ranking_mae,
)
from camobench.metrics.segmentation import e_measure, f_measure, mae, s_measure
from camobench.metrics.transport import emd
from camobench.models import (
    BenchConfig,
    DatasetManifest,
    ErrorNote,
    ManifestEntry,
    MetricConfig,
    PredictionFile,
)
from camobench.parallel import run_ordered

logger = logging.getLogger(__name__)

T = TypeVar("T")

SEG_METRICS: tuple[str, ...] = ("S", "F", "E", "MAE")
FIX_METRICS: tuple[str, ...] = ("SIM", "CC", "EMD", "KLD", "NSS", "AUC_J", "AUC_B", "sAUC")
RANK_METRICS: tuple[str, ...] = ("MAE", "r_MAE")

_BORJI_STREAM = 0
_SHUFFLED_STREAM = 1


def resolve_pred_roots(
    manifest: DatasetManifest, pred_roots: Optional[dict[str, str | Path]] = None
) -> dict[str, Path]:
    """CLI roots win over the manifest's ``predictions`` block."""
    if pred_roots:
        return {name: Path(root) for name, root in pred_roots.items()}
    roots = {name: manifest.resolve(root) for name, root in manifest.predictions.items()}
    if not roots:
        raise ManifestError("no prediction roots given and the manifest lists none")
    return roots


@dataclass
class _ImageOutcome:
    rows: list[MetricRow] = field(default_factory=list)
    errors: list[ErrorNote] = field(default_factory=list)
    ranked: dict[str, RankedImage] = field(default_factory=dict)


class _RowSink:
    """Collects rows and error notes for one image."""

    def __init__(self, image_id: str) -> None:
        self.image_id = image_id
        self.outcome = _ImageOutcome()

    def fail(
        self,
        exc: Exception,
        operation: str,
        method: Optional[str] = None,
        metric: Optional[str] = None,
        path: Optional[str] = None,
    ) -> None:
        self.outcome.errors.append(
            ErrorNote.from_exception(
                exc, operation, image_id=self.image_id, method=method, metric=metric, path=path
            )
        )

    def attempt(
        self,
        fn: Callable[[], T],
        operation: str,
        method: Optional[str] = None,
        metric: Optional[str] = None,
        path: Optional[str] = None,
    ) -> Optional[T]:
        try:
            return fn()
        except (CamoBenchError, ValueError) as e:
            self.fail(e, operation, method, metric, path)
            return None

    def measure(self, method: str, metric: str, fn: Callable[[], float], path: str) -> None:
        value = self.attempt(fn, metric.lower(), method, metric, path)
        if value is not None:
            self.outcome.rows.append(
                MetricRow(image_id=self.image_id, method=method, metric=metric, value=value)
            )

    def fail_all(
        self, exc: Exception, operation: str, method: str, metrics: tuple[str, ...], path: str
    ) -> None:
        for metric in metrics:
            self.fail(exc, operation, method, metric, path)


def _pred_path(root: Path, image_id: str, suffix: str) -> Path:
    return root / f"{image_id}{suffix}"


def _build_report(
    kind: str,
    manifest: DatasetManifest,
    methods: list[str],
    metrics: tuple[str, ...],
    outcomes: list[_ImageOutcome],
    config: BenchConfig,
    seed: int,
    strict: bool,
) -> EvaluationReport:
    rows = [row for o in outcomes for row in o.rows]
    errors = [note for o in outcomes for note in o.errors]
    if strict and errors:
        first = errors[0]
        raise EvaluationAborted(
            f"{first.operation} failed on {first.image_id} ({first.kind}): {first.message}",
            path=first.path,
        )
    for note in errors:
        logger.warning(
            "%s %s/%s: %s (%s)", note.operation, note.image_id, note.method, note.kind, note.path
        )
    return EvaluationReport(
        kind=kind,
        dataset=manifest.dataset,
        methods=methods,
        metrics=list(metrics),
        rows=rows,
        errors=errors,
        aggregates=compute_aggregates(rows, methods, metrics),
        metadata=report_metadata(config, seed, kind),
    )


# -----------------------------------------------------------------------------
# Segmentation
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class _SegTask:
    entry: ManifestEntry
    base_dir: Path
    roots: dict[str, Path]


def _seg_image(task: _SegTask) -> _ImageOutcome:
    entry = task.entry
    sink = _RowSink(entry.image_id)
    if entry.gt_mask is None:
        for method in task.roots:
            sink.fail_all(
                FileMissing("entry has no gt_mask"), "load_mask", method, SEG_METRICS, entry.image
            )
        return sink.outcome
    gt_path = task.base_dir / entry.gt_mask
    try:
        gt = load_mask(gt_path, entry.dims)
    except CamoBenchError as e:
        for method in task.roots:
            sink.fail_all(e, "load_mask", method, SEG_METRICS, str(gt_path))
        return sink.outcome

    for method, root in task.roots.items():
        path = _pred_path(root, entry.image_id, ".png")
        try:
            pred = load_scalar_map(path, entry.dims)
        except CamoBenchError as e:
            sink.fail_all(e, "load_scalar_map", method, SEG_METRICS, str(path))
            continue
        p = str(path)
        sink.measure(method, "S", lambda: s_measure(pred, gt), p)
        sink.measure(method, "F", lambda: f_measure(pred, gt), p)
        sink.measure(method, "E", lambda: e_measure(pred, gt), p)
        sink.measure(method, "MAE", lambda: mae(pred, gt), p)
    return sink.outcome


def eval_seg(
    manifest: DatasetManifest,
    pred_roots: Optional[dict[str, str | Path]] = None,
    config: BenchConfig | None = None,
    seed: int = 0,
    jobs: int = 1,
    strict: bool = False,
) -> EvaluationReport:
    """S-measure, F-measure, E-measure and MAE per image per method."""
    config = config or BenchConfig()
    roots = resolve_pred_roots(manifest, pred_roots)
    tasks = [_SegTask(e, manifest.base_dir, roots) for e in manifest.entries]
    outcomes = run_ordered(_seg_image, tasks, jobs)
    return _build_report(
        "seg", manifest, list(roots), SEG_METRICS, outcomes, config, seed, strict
    )


# -----------------------------------------------------------------------------
# Fixation
# -----------------------------------------------------------------------------


def load_fixation_points(entry: ManifestEntry, base_dir: Path) -> FixationPointSet:
    """Points from the entry's fixation logs, or from its fixation-point PNG."""
    if entry.fixation_logs:
        sessions = [read_fixation_log(base_dir / p, entry.dims) for p in entry.fixation_logs]
        return FixationPointSet.from_sessions(sessions, entry.dims)
    if entry.fixation_points is not None:
        return FixationPointSet.from_mask(load_mask(base_dir / entry.fixation_points, entry.dims))
    raise FileMissing(
        f"{entry.image_id}: no fixation logs or fixation-point map listed",
        path=str(base_dir / entry.image),
    )


def _pool_for(dims: Dims, others: list[FixationPointSet]) -> FixationPointSet:
    rescaled = [o.rescaled(dims) for o in others if len(o)]
    if not rescaled:
        return FixationPointSet.from_points([], dims)
    return FixationPointSet(
        dims,
        np.concatenate([o.xs for o in rescaled]),
        np.concatenate([o.ys for o in rescaled]),
    )


@dataclass(frozen=True)
class _FixTask:
    index: int
    entry: ManifestEntry
    base_dir: Path
    roots: dict[str, Path]
    metrics: MetricConfig
    seed: int
    points: Optional[FixationPointSet]
    points_error: Optional[ErrorNote]
    pool: FixationPointSet


_DISTRIBUTION_METRICS = ("SIM", "CC", "EMD", "KLD")
_LOCATION_METRICS = ("NSS", "AUC_J", "AUC_B", "sAUC")


def _fix_image(task: _FixTask) -> _ImageOutcome:
    entry, cfg = task.entry, task.metrics
    sink = _RowSink(entry.image_id)

    density: Optional[ScalarMap] = None
    density_error: Optional[tuple[Exception, str]] = None
    if entry.fixation_map is None:
        density_error = (FileMissing("entry has no fixation_map"), entry.image)
    else:
        gt_path = task.base_dir / entry.fixation_map
        try:
            density = load_scalar_map(gt_path, entry.dims)
        except CamoBenchError as e:
            density_error = (e, str(gt_path))

    for k, (method, root) in enumerate(task.roots.items()):
        path = _pred_path(root, entry.image_id, ".png")
        try:
            pred = load_scalar_map(path, entry.dims)
        except CamoBenchError as e:
            sink.fail_all(e, "load_scalar_map", method, FIX_METRICS, str(path))
            continue
        p = str(path)

        if density is not None:
            gt = density
            sink.measure(method, "SIM", lambda: sim(to_distribution(pred), to_distribution(gt)), p)
            sink.measure(method, "CC", lambda: cc(pred, gt), p)
            sink.measure(
                method,
                "EMD",
                lambda: emd(pred, gt, grid=cfg.emd_grid, pixel_units=cfg.emd_pixel_units),
                p,
            )
            sink.measure(
                method,
                "KLD",
                lambda: kld(to_distribution(pred), to_distribution(gt), cfg.kld_eps),
                p,
            )
        elif density_error is not None:
            exc, gt_path_str = density_error
            sink.fail_all(exc, "load_scalar_map", method, _DISTRIBUTION_METRICS, gt_path_str)

        if task.points is not None:
            points = task.points
            borji_seed = [task.seed, task.index, k, _BORJI_STREAM]
            shuffled_seed = [task.seed, task.index, k, _SHUFFLED_STREAM]
            sink.measure(method, "NSS", lambda: nss(pred, points), p)
            sink.measure(method, "AUC_J", lambda: auc_judd(pred, points), p)
            sink.measure(
                method, "AUC_B", lambda: auc_borji(pred, points, cfg.auc_splits, borji_seed), p
            )
            sink.measure(
                method,
                "sAUC",
                lambda: sauc(pred, points, task.pool, cfg.auc_splits, shuffled_seed),
                p,
            )
        elif task.points_error is not None:
            for metric in _LOCATION_METRICS:
                sink.outcome.errors.append(
                    task.points_error.model_copy(update={"method": method, "metric": metric})
                )
    return sink.outcome


def eval_fix(
    manifest: DatasetManifest,
    pred_roots: Optional[dict[str, str | Path]] = None,
    config: BenchConfig | None = None,
    seed: int = 0,
    jobs: int = 1,
    strict: bool = False,
) -> EvaluationReport:
    """The eight localization metrics per image per method.

    The sAUC negative pool of an image is every other image's fixation points,
    mapped proportionally onto this image's size.
    """
    config = config or BenchConfig()
    roots = resolve_pred_roots(manifest, pred_roots)
    base_dir = manifest.base_dir

    points: list[Optional[FixationPointSet]] = []
    point_errors: list[Optional[ErrorNote]] = []
    for entry in manifest.entries:
        try:
            points.append(load_fixation_points(entry, base_dir))
            point_errors.append(None)
        except CamoBenchError as e:
            points.append(None)
            point_errors.append(
                ErrorNote.from_exception(e, "load_fixation_points", image_id=entry.image_id)
            )

    tasks = []
    for i, entry in enumerate(manifest.entries):
        others = [pts for j, pts in enumerate(points) if j != i and pts is not None]
        tasks.append(
            _FixTask(
                index=i,
                entry=entry,
                base_dir=base_dir,
                roots=roots,
                metrics=config.metrics,
                seed=seed,
                points=points[i],
                points_error=point_errors[i],
                pool=_pool_for(entry.dims, others),
            )
        )
    outcomes = run_ordered(_fix_image, tasks, jobs)
    return _build_report(
        "fix", manifest, list(roots), FIX_METRICS, outcomes, config, seed, strict
    )


# -----------------------------------------------------------------------------
# Ranking
# -----------------------------------------------------------------------------


def load_prediction_instances(path: Path, dims: Dims) -> list[InstanceRecord]:
    """Instance records of a prediction JSON; mask paths are relative to the JSON file."""
    if not path.is_file():
        raise FileMissing(f"{path} does not exist", path=str(path))
    try:
        document = PredictionFile.model_validate_json(path.read_text())
    except ValueError as e:
        raise ManifestError(f"{path}: malformed prediction file: {e}", path=str(path)) from e
    records = []
    for index, inst in enumerate(document.instances):
        mask_path = path.parent / inst.mask
        records.append(
            InstanceRecord(
                instance_id=str(index),
                mask=load_mask(mask_path, dims),
                bbox=inst.bbox,
                rank=inst.rank,
                score=inst.score,
                source=str(mask_path),
            )
        )
    return records


def load_gt_instances(entry: ManifestEntry, base_dir: Path) -> list[InstanceRecord]:
    return [
        InstanceRecord(
            instance_id=str(index),
            mask=load_mask(base_dir / inst.mask, entry.dims),
            rank=inst.rank,
            source=str(base_dir / inst.mask),
        )
        for index, inst in enumerate(entry.instances)
    ]


@dataclass(frozen=True)
class _RankTask:
    entry: ManifestEntry
    base_dir: Path
    roots: dict[str, Path]


def _rank_image(task: _RankTask) -> _ImageOutcome:
    entry = task.entry
    sink = _RowSink(entry.image_id)
    try:
        gt_instances = load_gt_instances(entry, task.base_dir)
        gt_mask: BinaryMask = (
            load_mask(task.base_dir / entry.gt_mask, entry.dims)
            if entry.gt_mask is not None
            else union_mask(gt_instances, entry.dims)
        )
        gt_ranks: RankMap = paint_rank_map(gt_instances, entry.dims)
    except CamoBenchError as e:
        for method in task.roots:
            sink.fail_all(e, "load_gt_instances", method, RANK_METRICS, entry.image)
        return sink.outcome

    for method, root in task.roots.items():
        path = _pred_path(root, entry.image_id, ".json")
        try:
            predictions = load_prediction_instances(path, entry.dims)
        except (CamoBenchError, ValueError) as e:
            sink.fail_all(e, "load_prediction_instances", method, RANK_METRICS, str(path))
            continue
        p = str(path)
        sink.outcome.ranked[method] = RankedImage(entry.image_id, gt_instances, predictions)
        sink.measure(method, "MAE", lambda: ranking_mae(predictions, gt_mask), p)
        sink.measure(
            method,
            "r_MAE",
            lambda: r_mae(rank_prediction_to_map(predictions, entry.dims), gt_ranks),
            p,
        )
    return sink.outcome


def eval_rank(
    manifest: DatasetManifest,
    pred_roots: Optional[dict[str, str | Path]] = None,
    config: BenchConfig | None = None,
    seed: int = 0,
    jobs: int = 1,
    strict: bool = False,
) -> EvaluationReport:
    """Per-image MAE and r_MAE plus dataset-level Corr and rank penalty per method."""
    config = config or BenchConfig()
    roots = resolve_pred_roots(manifest, pred_roots)
    tasks = [_RankTask(e, manifest.base_dir, roots) for e in manifest.entries]
    outcomes = run_ordered(_rank_image, tasks, jobs)
    report = _build_report(
        "rank", manifest, list(roots), RANK_METRICS, outcomes, config, seed, strict
    )

    matrix = config.penalty()
    match = config.match
    if match.seed is None:
        match = match.model_copy(update={"seed": seed})
    for method in roots:
        images = [o.ranked[method] for o in outcomes if method in o.ranked]
        try:
            outcome = corr(images, match)
            report.dataset_rows.append(
                DatasetRow(
                    method=method,
                    metric="Corr",
                    value=outcome.value,
                    details={
                        "excluded": outcome.excluded,
                        "pool_sizes": outcome.pool_sizes,
                        "degenerate": outcome.degenerate,
                        "samplings": outcome.samplings,
                    },
                )
            )
        except CamoBenchError as e:
            report.errors.append(ErrorNote.from_exception(e, "corr", method=method, metric="Corr"))

        pool = build_matched_pool(images, config.match.iou_threshold)
        try:
            report.dataset_rows.append(
                DatasetRow(
                    method=method,
                    metric="rank_penalty",
                    value=rank_penalty(pool.pairs, matrix),
                    details={"pairs": len(pool.pairs)},
                )
            )
        except EmptyInput as e:
            report.errors.append(
                ErrorNote.from_exception(e, "rank_penalty", method=method, metric="rank_penalty")
            )

    if strict and report.errors:
        first = report.errors[0]
        raise EvaluationAborted(f"{first.operation} failed ({first.kind}): {first.message}")
    return report


# -----------------------------------------------------------------------------
# Attributes
# -----------------------------------------------------------------------------


def attribute_report(
    manifest: DatasetManifest,
    result: AttributeResult,
    config: BenchConfig | None = None,
    seed: int = 0,
) -> EvaluationReport:
    """Attribute flags as 0/1 rows; the aggregate of a flag is its prevalence."""
    config = config or BenchConfig()
    metrics = list(ATTRIBUTE_NAMES) + ["bm_score", "cb_score", "gabrat"]
    rows = []
    for flags in result.flags:
        for metric in metrics:
            value = getattr(flags, metric)
            if value is None:
                continue
            rows.append(
                MetricRow(
                    image_id=flags.image_id,
                    instance_id=flags.instance_id,
                    method="attributes",
                    metric=metric,
                    value=float(value),
                )
            )
    return EvaluationReport(
        kind="attrs",
        dataset=manifest.dataset,
        methods=["attributes"],
        metrics=metrics,
        rows=rows,
        errors=list(result.errors),
        aggregates=compute_aggregates(rows, ["attributes"], metrics),
        metadata=report_metadata(config, seed, "attrs"),
    )

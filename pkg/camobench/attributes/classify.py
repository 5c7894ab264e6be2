"""Per-image attribute classification with per-attribute error isolation."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, TypeVar

from pydantic import BaseModel, ConfigDict

from camobench.attributes.flags import bm_flag, cb_flag, cp_flag, sa_flag, so_flag
from camobench.attributes.gabrat import dc_gabrat
from camobench.attributes.superpixels import slic_superpixels, superpixel_features
from camobench.core.imageio import RgbImage, load_mask, load_rgb_image, load_scalar_map
from camobench.core.maps import BinaryMask, ScalarMap
from camobench.errors import CamoBenchError, EmptyMask
from camobench.models import AttributeConfig, DatasetManifest, ErrorNote, ManifestEntry
from camobench.parallel import run_ordered

logger = logging.getLogger(__name__)

T = TypeVar("T")

ATTRIBUTE_NAMES: tuple[str, ...] = ("BM", "CB", "CP", "DC", "MM", "OC", "SA", "SO")


class AttributeFlags(BaseModel):
    """Attribute flags of one instance. None means Unknown."""

    model_config = ConfigDict(frozen=True)

    image_id: str
    instance_id: str
    BM: Optional[bool] = None
    CB: Optional[bool] = None
    CP: Optional[bool] = None
    DC: Optional[bool] = None
    MM: Optional[bool] = None
    OC: Optional[bool] = None
    SA: Optional[bool] = None
    SO: Optional[bool] = None
    bm_score: Optional[float] = None
    cb_score: Optional[float] = None
    gabrat: Optional[float] = None

    def carries(self, attribute: str) -> bool:
        return getattr(self, attribute) is True


@dataclass
class AttributeResult:
    flags: list[AttributeFlags] = field(default_factory=list)
    errors: list[ErrorNote] = field(default_factory=list)


@dataclass(frozen=True)
class _Inputs:
    image_id: str
    image: Optional[RgbImage]
    gt: Optional[BinaryMask]
    saliency: Optional[ScalarMap]
    instances: list[tuple[str, BinaryMask, str]]


class _Recorder:
    def __init__(self, image_id: str) -> None:
        self.image_id = image_id
        self.errors: list[ErrorNote] = []

    def attempt(
        self,
        fn: Callable[[], T],
        operation: str,
        metric: str,
        path: Optional[str] = None,
    ) -> Optional[T]:
        try:
            return fn()
        except (CamoBenchError, ValueError) as e:
            logger.warning("%s failed for %s: %s", operation, self.image_id, e)
            self.errors.append(
                ErrorNote.from_exception(
                    e, operation, image_id=self.image_id, metric=metric, path=path
                )
            )
            return None


def _load_inputs(entry: ManifestEntry, base_dir: Path, rec: _Recorder) -> _Inputs:
    def resolve(relative: str) -> Path:
        p = Path(relative)
        return p if p.is_absolute() else base_dir / p

    dims = entry.dims
    image_path = resolve(entry.image)
    image = rec.attempt(
        lambda: load_rgb_image(image_path, dims), "load_rgb_image", "image", str(image_path)
    )

    instances: list[tuple[str, BinaryMask, str]] = []
    for index, inst in enumerate(entry.instances):
        mask_path = resolve(inst.mask)
        mask = rec.attempt(lambda: load_mask(mask_path, dims), "load_mask", "instance", str(mask_path))
        if mask is not None:
            instances.append((str(index), mask, str(mask_path)))

    gt: Optional[BinaryMask] = None
    if entry.gt_mask is not None:
        gt_path = resolve(entry.gt_mask)
        gt = rec.attempt(lambda: load_mask(gt_path, dims), "load_mask", "gt_mask", str(gt_path))
    elif instances:
        bits = instances[0][1].bits.copy()
        for _, mask, _ in instances[1:]:
            bits |= mask.bits
        gt = BinaryMask(bits)
    if not entry.instances and gt is not None:
        instances.append(("0", gt, str(resolve(entry.gt_mask or entry.image))))

    saliency: Optional[ScalarMap] = None
    if entry.saliency_map is not None:
        sal_path = resolve(entry.saliency_map)
        saliency = rec.attempt(
            lambda: load_scalar_map(sal_path, dims), "load_scalar_map", "SA", str(sal_path)
        )
    return _Inputs(entry.image_id, image, gt, saliency, instances)


def classify_attributes(
    entry: ManifestEntry,
    base_dir: str | Path = ".",
    config: AttributeConfig | None = None,
) -> AttributeResult:
    """Flags for every instance of one manifest entry.

    Image-level attributes (BM, CB) repeat on every instance row. MM and OC are
    copied from the manifest. A failing attribute leaves its field Unknown and
    records an error note; the other attributes are still computed.
    """
    config = config or AttributeConfig()
    rec = _Recorder(entry.image_id)
    inputs = _load_inputs(entry, Path(base_dir), rec)
    image, gt = inputs.image, inputs.gt

    bm: Optional[tuple[bool, float]] = None
    cb: Optional[tuple[bool, float]] = None
    if image is not None and gt is not None:
        bm = rec.attempt(
            lambda: bm_flag(
                superpixel_features(image, slic_superpixels(image, config), gt, config), config
            ),
            "bm_flag",
            "BM",
        )
        cb = rec.attempt(lambda: cb_flag(image, gt, config), "cb_flag", "CB")

    if not inputs.instances:
        rec.errors.append(
            ErrorNote.from_exception(
                EmptyMask("entry has no readable instance or ground-truth mask"),
                "classify_attributes",
                image_id=entry.image_id,
            )
        )

    flags = []
    for instance_id, mask, source in inputs.instances:
        cp = rec.attempt(lambda: cp_flag(mask, entry.dims, config), "cp_flag", "CP", source)
        so = rec.attempt(lambda: so_flag(mask, entry.dims, config), "so_flag", "SO", source)
        dc = None
        if image is not None:
            dc = rec.attempt(lambda: dc_gabrat(image, mask, config), "dc_gabrat", "DC", source)
        sa = rec.attempt(lambda: sa_flag(inputs.saliency, mask, config), "sa_flag", "SA", source)
        flags.append(
            AttributeFlags(
                image_id=entry.image_id,
                instance_id=instance_id,
                BM=bm[0] if bm else None,
                CB=cb[0] if cb else None,
                CP=cp,
                DC=dc[0] if dc else None,
                MM=entry.mm,
                OC=entry.oc,
                SA=sa,
                SO=so,
                bm_score=bm[1] if bm else None,
                cb_score=cb[1] if cb else None,
                gabrat=dc[1] if dc else None,
            )
        )
    return AttributeResult(flags, rec.errors)


@dataclass(frozen=True)
class _AttributeTask:
    entry: ManifestEntry
    base_dir: Path
    config: AttributeConfig


def _classify_task(task: _AttributeTask) -> AttributeResult:
    return classify_attributes(task.entry, task.base_dir, task.config)


def classify_dataset(
    manifest: DatasetManifest,
    config: AttributeConfig | None = None,
    jobs: int = 1,
) -> AttributeResult:
    """Classify every entry; rows come back in manifest order."""
    config = config or AttributeConfig()
    tasks = [_AttributeTask(e, manifest.base_dir, config) for e in manifest.entries]
    results = run_ordered(_classify_task, tasks, jobs)
    merged = AttributeResult()
    for result in results:
        merged.flags.extend(result.flags)
        merged.errors.extend(result.errors)
    logger.info(
        "classified %d instances across %d images (%d errors)",
        len(merged.flags),
        len(tasks),
        len(merged.errors),
    )
    return merged

"""Camouflaged instances and rank painting."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from camobench.core.maps import BinaryMask, Dims, RankMap, check_dims
from camobench.errors import EmptyMask, MissingRank
from camobench.models import RankLabel

logger = logging.getLogger(__name__)

BBox = tuple[int, int, int, int]
"""(x, y, w, h) in pixels."""


def mask_bbox(mask: BinaryMask) -> BBox:
    """Tight axis-aligned bound of a nonempty mask."""
    ys, xs = np.nonzero(mask.bits)
    if xs.size == 0:
        raise EmptyMask("mask has no foreground pixels")
    x0, x1 = int(xs.min()), int(xs.max())
    y0, y1 = int(ys.min()), int(ys.max())
    return (x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def bbox_iou(a: BBox, b: BBox) -> float:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    iw = max(0, min(ax + aw, bx + bw) - max(ax, bx))
    ih = max(0, min(ay + ah, by + bh) - max(ay, by))
    inter = iw * ih
    union = aw * ah + bw * bh - inter
    return inter / union if union > 0 else 0.0


@dataclass(frozen=True, eq=False)
class InstanceRecord:
    """One camouflaged instance, ground truth or predicted."""

    instance_id: str
    mask: BinaryMask
    bbox: Optional[BBox] = None
    rank: Optional[RankLabel] = None
    score: Optional[float] = None
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.bbox is None:
            object.__setattr__(self, "bbox", mask_bbox(self.mask))
        else:
            x, y, w, h = self.bbox
            if w <= 0 or h <= 0 or x < 0 or y < 0:
                raise ValueError(f"bbox {self.bbox} must have nonnegative origin and positive size")
            object.__setattr__(self, "bbox", (int(x), int(y), int(w), int(h)))
        if self.score is not None and not 0.0 <= self.score <= 1.0:
            raise ValueError("score must lie in [0, 1]")

    @property
    def box(self) -> BBox:
        assert self.bbox is not None
        return self.bbox


def paint_rank_map(instances: Sequence[InstanceRecord], dims: Dims) -> RankMap:
    """Paint instance ranks over a BG canvas.

    Overlaps go to the higher-score instance. Without scores the later-listed
    instance wins and a warning is logged.
    """
    width, height = dims
    labels = np.full((height, width), int(RankLabel.BG), dtype=np.uint8)
    for inst in instances:
        if inst.rank is None:
            raise MissingRank(f"instance {inst.instance_id} has no rank", path=inst.source)
        check_dims(inst.mask.dims, dims, path=inst.source)

    scored = all(inst.score is not None for inst in instances)
    if scored:
        # stable: equal scores keep list order, so the later-listed one paints last
        order = sorted(range(len(instances)), key=lambda i: instances[i].score or 0.0)
    else:
        order = list(range(len(instances)))

    painted = np.zeros((height, width), dtype=bool)
    overlapped = False
    for i in order:
        inst = instances[i]
        bits = inst.mask.bits
        overlapped = overlapped or bool(np.any(painted & bits))
        labels[bits] = int(inst.rank)  # type: ignore[arg-type]
        painted |= bits

    if overlapped and not scored:
        logger.warning(
            "overlapping instances without scores; later-listed instance wins (%s)",
            ", ".join(inst.instance_id for inst in instances),
        )
    return RankMap(labels)


def union_mask(instances: Sequence[InstanceRecord], dims: Dims) -> BinaryMask:
    width, height = dims
    bits = np.zeros((height, width), dtype=bool)
    for inst in instances:
        check_dims(inst.mask.dims, dims, path=inst.source)
        bits |= inst.mask.bits
    return BinaryMask(bits)

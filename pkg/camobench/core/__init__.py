"""Shared domain types, image I/O and normalization."""

from camobench.core.fixations import FixationPointSet
from camobench.core.imageio import (
    RgbImage,
    load_mask,
    load_rank_map,
    load_rgb_image,
    load_scalar_map,
    save_mask,
    save_rank_map,
    save_scalar_map,
)
from camobench.core.instances import (
    InstanceRecord,
    bbox_iou,
    mask_bbox,
    paint_rank_map,
    union_mask,
)
from camobench.core.maps import (
    BinaryMask,
    Dims,
    MapKind,
    RankMap,
    ScalarMap,
    check_dims,
    to_distribution,
    z_score,
)

__all__ = [
    "BinaryMask",
    "Dims",
    "FixationPointSet",
    "InstanceRecord",
    "MapKind",
    "RankMap",
    "RgbImage",
    "ScalarMap",
    "bbox_iou",
    "check_dims",
    "load_mask",
    "load_rank_map",
    "load_rgb_image",
    "load_scalar_map",
    "mask_bbox",
    "paint_rank_map",
    "save_mask",
    "save_rank_map",
    "save_scalar_map",
    "to_distribution",
    "union_mask",
    "z_score",
]

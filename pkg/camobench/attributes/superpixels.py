"""SLIC over-segmentation and per-superpixel features."""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from skimage.segmentation import slic

from camobench.attributes.features import lab_histogram, lbp_codes, texture_histogram, to_lab
from camobench.core.imageio import RgbImage
from camobench.core.maps import BinaryMask, check_dims
from camobench.errors import TooManySuperpixels
from camobench.models import AttributeConfig

logger = logging.getLogger(__name__)


class Side(str, Enum):
    FOREGROUND = "foreground"
    BACKGROUND = "background"


@dataclass(frozen=True, eq=False)
class Superpixel:
    id: int
    members: np.ndarray
    mean_lab: np.ndarray
    color_hist: np.ndarray
    texture_hist: np.ndarray
    side: Side

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.members))


def slic_superpixels(image: RgbImage, config: AttributeConfig | None = None) -> np.ndarray:
    """Label image (h, w) with consecutive superpixel ids starting at 0.

    Every label is a single connected component.
    """
    config = config or AttributeConfig()
    height, width = image.pixels.shape[:2]
    if config.slic_segments > height * width:
        raise TooManySuperpixels(
            f"{config.slic_segments} superpixels requested for {height * width} pixels"
        )
    labels = slic(
        image.pixels,
        n_segments=config.slic_segments,
        compactness=config.slic_compactness,
        max_num_iter=config.slic_iterations,
        convert2lab=True,
        enforce_connectivity=True,
        start_label=0,
        channel_axis=-1,
    )
    _, consecutive = np.unique(labels, return_inverse=True)
    return consecutive.reshape(labels.shape)


def superpixel_features(
    image: RgbImage,
    labels: np.ndarray,
    gt_mask: BinaryMask,
    config: AttributeConfig | None = None,
) -> list[Superpixel]:
    config = config or AttributeConfig()
    check_dims(gt_mask.dims, image.dims)
    lab = to_lab(image)
    codes = lbp_codes(image, config.lbp_radius, config.lbp_neighbors)
    superpixels = []
    for label in range(int(labels.max()) + 1):
        members = labels == label
        count = np.count_nonzero(members)
        if count == 0:
            continue
        inside = np.count_nonzero(members & gt_mask.bits)
        pixels = lab[members]
        superpixels.append(
            Superpixel(
                id=label,
                members=members,
                mean_lab=pixels.mean(axis=0),
                color_hist=lab_histogram(pixels, config.color_bins),
                texture_hist=texture_histogram(codes[members], config.lbp_neighbors),
                side=Side.FOREGROUND if inside * 2 > count else Side.BACKGROUND,
            )
        )
    logger.debug(
        "%d superpixels, %d foreground",
        len(superpixels),
        sum(sp.side is Side.FOREGROUND for sp in superpixels),
    )
    return superpixels

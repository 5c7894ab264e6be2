"""Per-attribute decision rules.

Score-bearing flags return ``(flag, score)``. Background complexity measures are
registered by name so the measure used travels with the report.
"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np
from skimage.color import rgb2gray

from camobench.attributes.features import combined_distance
from camobench.attributes.superpixels import Side, Superpixel
from camobench.core.imageio import RgbImage
from camobench.core.maps import BinaryMask, Dims, ScalarMap, check_dims
from camobench.errors import EmptyMask, InvalidConfig, NoBackground, NoForeground
from camobench.metrics.segmentation import adaptive_binarize
from camobench.models import AttributeConfig, CenterDirection

logger = logging.getLogger(__name__)

ComplexityMeasure = Callable[[RgbImage, np.ndarray], float]

COMPLEXITY_MEASURES: dict[str, ComplexityMeasure] = {}


def register_complexity(name: str) -> Callable[[ComplexityMeasure], ComplexityMeasure]:
    def decorator(fn: ComplexityMeasure) -> ComplexityMeasure:
        COMPLEXITY_MEASURES[name] = fn
        return fn

    return decorator


@register_complexity("gradient")
def gradient_complexity(image: RgbImage, background: np.ndarray) -> float:
    """Mean forward-difference gradient magnitude of luminance over the background.

    Differences at the last row and column are zero. Normalized by sqrt(2), the
    largest magnitude a [0, 1] image can produce: a one-pixel checkerboard
    scores 1 and one-pixel stripes about 0.71.
    """
    gray = rgb2gray(image.pixels)
    gx = np.diff(gray, axis=1, append=gray[:, -1:])
    gy = np.diff(gray, axis=0, append=gray[-1:, :])
    magnitude = np.hypot(gx, gy) / np.sqrt(2.0)
    return float(np.clip(magnitude[background].mean(), 0.0, 1.0))


# -----------------------------------------------------------------------------
# Image-level flags
# -----------------------------------------------------------------------------


def bm_flag(
    superpixels: Sequence[Superpixel], config: AttributeConfig | None = None
) -> tuple[bool, float]:
    """Background matching: foreground superpixels statistically close to the background."""
    config = config or AttributeConfig()
    fg = [sp for sp in superpixels if sp.side is Side.FOREGROUND]
    bg = [sp for sp in superpixels if sp.side is Side.BACKGROUND]
    if not fg:
        raise NoForeground("no foreground superpixel")
    if not bg:
        raise NoBackground("no background superpixel")
    per_fg = [
        np.mean(
            [
                combined_distance(
                    f.color_hist, f.texture_hist, b.color_hist, b.texture_hist, config.chi_mode
                )
                for b in bg
            ]
        )
        for f in fg
    ]
    score = float(np.mean(per_fg))
    return score < config.bm_threshold, score


def cb_flag(
    image: RgbImage, gt_mask: BinaryMask, config: AttributeConfig | None = None
) -> tuple[bool, float]:
    config = config or AttributeConfig()
    check_dims(gt_mask.dims, image.dims)
    measure = COMPLEXITY_MEASURES.get(config.cb_measure)
    if measure is None:
        raise InvalidConfig(
            f"unknown complexity measure '{config.cb_measure}'; "
            f"available: {sorted(COMPLEXITY_MEASURES)}"
        )
    background = ~gt_mask.bits
    if not background.any():
        raise NoBackground("ground truth covers the whole image")
    score = measure(image, background)
    return score > config.cb_threshold, score


# -----------------------------------------------------------------------------
# Instance-level flags
# -----------------------------------------------------------------------------


def mask_centroid(mask: BinaryMask) -> tuple[float, float]:
    """(u, v) centroid in continuous coordinates, pixel centers at +0.5."""
    ys, xs = np.nonzero(mask.bits)
    if xs.size == 0:
        raise EmptyMask("mask has no foreground pixels")
    return float(xs.mean()) + 0.5, float(ys.mean()) + 0.5


def cp_flag(mask: BinaryMask, dims: Dims, config: AttributeConfig | None = None) -> bool:
    """Center position relative to the image center, in fractions of W and H."""
    config = config or AttributeConfig()
    check_dims(mask.dims, dims)
    width, height = dims
    u, v = mask_centroid(mask)
    du = abs(u - width / 2.0)
    dv = abs(v - height / 2.0)
    sigma = config.cp_sigma
    if config.cp_direction == CenterDirection.NEAR:
        return du < sigma * width or dv < sigma * height
    return du > sigma * width or dv > sigma * height


def so_flag(mask: BinaryMask, dims: Dims, config: AttributeConfig | None = None) -> bool:
    config = config or AttributeConfig()
    check_dims(mask.dims, dims)
    width, height = dims
    return mask.area / (width * height) < config.so_threshold


def sa_flag(
    saliency: Optional[ScalarMap],
    mask: BinaryMask,
    config: AttributeConfig | None = None,
) -> Optional[bool]:
    """Salient-as-camouflaged. None when no saliency map is available."""
    if saliency is None:
        return None
    config = config or AttributeConfig()
    check_dims(saliency.dims, mask.dims)
    peak = saliency.values.max()
    if peak <= 0 or mask.area == 0:
        return False
    mean_ratio = saliency.values[mask.bits].mean() / peak
    binary = adaptive_binarize(saliency)
    union = np.count_nonzero(binary | mask.bits)
    iou = np.count_nonzero(binary & mask.bits) / union if union else 0.0
    return bool(mean_ratio >= config.sa_mean_threshold and iou >= config.sa_iou_threshold)

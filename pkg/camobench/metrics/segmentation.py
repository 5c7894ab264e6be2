"""Binary-segmentation metrics: MAE, adaptive F-measure, S-measure, adaptive E-measure."""

import numpy as np

from camobench.core.maps import BinaryMask, ScalarMap, check_dims
from camobench.errors import EmptyGroundTruth

BETA_SQUARED = 0.3
ALPHA = 0.5
_EPS = np.finfo(np.float64).eps
_ALIGN_EPS = 1e-12


def adaptive_threshold(pred: ScalarMap) -> float:
    return float(min(2.0 * pred.values.mean(), 1.0))


def adaptive_binarize(pred: ScalarMap) -> np.ndarray:
    """pred >= min(2 * mean, 1). An all-zero prediction binarizes to nothing."""
    threshold = adaptive_threshold(pred)
    if threshold <= 0:
        return np.zeros(pred.values.shape, dtype=bool)
    return pred.values >= threshold


def mae(pred: ScalarMap, gt: BinaryMask) -> float:
    check_dims(pred.dims, gt.dims)
    return float(np.mean(np.abs(pred.values - gt.bits)))


def f_measure(pred: ScalarMap, gt: BinaryMask) -> float:
    check_dims(pred.dims, gt.dims)
    positives = gt.area
    if positives == 0:
        raise EmptyGroundTruth("F-measure needs a nonempty ground truth")
    binary = adaptive_binarize(pred)
    tp = float(np.count_nonzero(binary & gt.bits))
    predicted = float(np.count_nonzero(binary))
    precision = tp / predicted if predicted else 0.0
    recall = tp / positives
    if precision + recall == 0:
        return 0.0
    return (1 + BETA_SQUARED) * precision * recall / (BETA_SQUARED * precision + recall)


# -----------------------------------------------------------------------------
# S-measure
# -----------------------------------------------------------------------------


def _object_similarity(values: np.ndarray) -> float:
    """Similarity of the region's values against an ideal all-ones region."""
    if values.size == 0:
        return 0.0
    x = values.mean()
    sigma = values.std(ddof=1) if values.size > 1 else 0.0
    return float(2.0 * x / (x * x + 1.0 + sigma + _EPS))


def _object_term(pred: np.ndarray, gt: np.ndarray) -> float:
    u = gt.mean()
    fg = _object_similarity(pred[gt])
    bg = _object_similarity(1.0 - pred[~gt])
    return float(u * fg + (1.0 - u) * bg)


def _block_ssim(pred: np.ndarray, gt: np.ndarray) -> float:
    n = pred.size
    x = pred.mean()
    y = gt.mean()
    if n > 1:
        sigma_x = ((pred - x) ** 2).sum() / (n - 1)
        sigma_y = ((gt - y) ** 2).sum() / (n - 1)
        sigma_xy = ((pred - x) * (gt - y)).sum() / (n - 1)
    else:
        sigma_x = sigma_y = sigma_xy = 0.0
    alpha = 4.0 * x * y * sigma_xy
    beta = (x * x + y * y) * (sigma_x + sigma_y)
    if alpha != 0:
        return float(alpha / (beta + _EPS))
    if beta == 0:
        return 1.0
    return 0.0


def _region_term(pred: np.ndarray, gt: np.ndarray) -> float:
    h, w = gt.shape
    ys, xs = np.nonzero(gt)
    cx = int(np.round(xs.mean())) + 1
    cy = int(np.round(ys.mean())) + 1
    cx, cy = min(cx, w), min(cy, h)
    area = float(h * w)
    blocks = [
        (slice(0, cy), slice(0, cx)),
        (slice(0, cy), slice(cx, w)),
        (slice(cy, h), slice(0, cx)),
        (slice(cy, h), slice(cx, w)),
    ]
    score = 0.0
    for rows, cols in blocks:
        p_block = pred[rows, cols]
        if p_block.size == 0:
            continue
        score += p_block.size / area * _block_ssim(p_block, gt[rows, cols].astype(np.float64))
    return score


def s_measure(pred: ScalarMap, gt: BinaryMask) -> float:
    """Structure measure: 0.5 * object-aware + 0.5 * region-aware similarity."""
    check_dims(pred.dims, gt.dims)
    p = pred.values
    g = gt.bits
    mu = g.mean()
    if mu == 0:
        return float(1.0 - p.mean())
    if mu == 1:
        return float(p.mean())
    score = ALPHA * _object_term(p, g) + (1.0 - ALPHA) * _region_term(p, g)
    return float(np.clip(score, 0.0, 1.0))


# -----------------------------------------------------------------------------
# E-measure
# -----------------------------------------------------------------------------


def e_measure(pred: ScalarMap, gt: BinaryMask) -> float:
    """Enhanced-alignment measure on the adaptively binarized prediction."""
    check_dims(pred.dims, gt.dims)
    binary = adaptive_binarize(pred).astype(np.float64)
    g = gt.bits.astype(np.float64)
    mu = g.mean()
    if mu == 0:
        return float(1.0 - binary.mean())
    if mu == 1:
        return float(binary.mean())
    phi_g = g - mu
    phi_p = binary - binary.mean()
    align = 2.0 * phi_g * phi_p / (phi_g**2 + phi_p**2 + _ALIGN_EPS)
    enhanced = (align + 1.0) ** 2 / 4.0
    return float(enhanced.mean())

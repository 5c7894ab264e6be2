"""Localization metrics against eye-tracking ground truth.

Distribution metrics (SIM, CC, KLD) take density maps; location metrics (NSS and
the three AUC variants) take discrete fixation points. EMD lives in
``camobench.metrics.transport``.
"""

import logging

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import pearsonr

from camobench.core.fixations import FixationPointSet
from camobench.core.maps import MapKind, ScalarMap, check_dims, z_score
from camobench.errors import (
    AllFixated,
    DegenerateMap,
    EmptyFixations,
    EmptyNegativePool,
    InsufficientNegatives,
    NotNormalized,
)

logger = logging.getLogger(__name__)

KLD_EPS = 2.220446e-16
_MASS_TOLERANCE = 1e-6


def _require_distribution(m: ScalarMap, name: str) -> np.ndarray:
    if m.kind == MapKind.DISTRIBUTION:
        return m.values
    if m.values.min() < 0 or abs(m.values.sum() - 1.0) > _MASS_TOLERANCE:
        raise NotNormalized(f"{name} is not a probability distribution")
    return m.values


def sim(p: ScalarMap, q: ScalarMap) -> float:
    """Histogram intersection of two distributions."""
    check_dims(p.dims, q.dims)
    a = _require_distribution(p, "p")
    b = _require_distribution(q, "q")
    return float(np.minimum(a, b).sum())


def cc(p: ScalarMap, q: ScalarMap) -> float:
    check_dims(p.dims, q.dims)
    if np.ptp(p.values) == 0 or np.ptp(q.values) == 0:
        raise DegenerateMap("correlation is undefined for a constant map")
    r = pearsonr(p.values.ravel(), q.values.ravel())[0]
    return float(np.clip(r, -1.0, 1.0))


def kld(p: ScalarMap, q: ScalarMap, eps: float = KLD_EPS) -> float:
    """KL divergence of the prediction ``p`` from the ground truth ``q``."""
    check_dims(p.dims, q.dims)
    a, b = p.values, q.values
    return float(np.sum(b * np.log(eps + b / (a + eps))))


def _require_fixations(pred: ScalarMap, fixations: FixationPointSet) -> None:
    check_dims(fixations.dims, pred.dims)
    if len(fixations) == 0:
        raise EmptyFixations("no fixation points")


def nss(pred: ScalarMap, fixations: FixationPointSet) -> float:
    _require_fixations(pred, fixations)
    standardized = z_score(pred).values
    return float(standardized[fixations.ys, fixations.xs].mean())


# -----------------------------------------------------------------------------
# AUC family
# -----------------------------------------------------------------------------


def threshold_sweep_auc(positives: np.ndarray, negatives: np.ndarray) -> float:
    """Area under the ROC curve swept at the distinct positive values.

    TPR and FPR count values >= t; the curve is closed with (0, 0) and (1, 1).
    """
    thresholds = np.unique(positives)[::-1]
    pos = np.sort(positives)
    neg = np.sort(negatives)
    tpr = (pos.size - np.searchsorted(pos, thresholds, side="left")) / pos.size
    fpr = (neg.size - np.searchsorted(neg, thresholds, side="left")) / neg.size
    tpr = np.concatenate([[0.0], tpr, [1.0]])
    fpr = np.concatenate([[0.0], fpr, [1.0]])
    return float(trapezoid(tpr, fpr))


def auc_judd(pred: ScalarMap, fixations: FixationPointSet) -> float:
    _require_fixations(pred, fixations)
    fixated = fixations.to_mask()
    if fixated.all():
        raise AllFixated("every pixel is fixated; no negatives")
    return threshold_sweep_auc(pred.values[fixated], pred.values[~fixated])


def auc_borji(
    pred: ScalarMap,
    fixations: FixationPointSet,
    splits: int = 100,
    seed: int | np.random.SeedSequence | list[int] = 0,
) -> float:
    """AUC against uniformly sampled non-fixated pixels, averaged over splits."""
    _require_fixations(pred, fixations)
    fixated = fixations.to_mask()
    positives = pred.values[fixated]
    pool = pred.values[~fixated]
    n = positives.size
    if pool.size < n:
        raise InsufficientNegatives(f"{pool.size} non-fixated pixels for {n} fixations")
    rng = np.random.default_rng(seed)
    scores = [
        threshold_sweep_auc(positives, rng.choice(pool, size=n, replace=False))
        for _ in range(splits)
    ]
    return float(np.mean(scores))


def sauc(
    pred: ScalarMap,
    fixations: FixationPointSet,
    other_fixations: FixationPointSet,
    splits: int = 100,
    seed: int | np.random.SeedSequence | list[int] = 0,
) -> float:
    """Shuffled AUC: negatives are other images' fixations mapped onto this image."""
    _require_fixations(pred, fixations)
    if tuple(other_fixations.dims) != tuple(pred.dims):
        other_fixations = other_fixations.rescaled(pred.dims)
    others = other_fixations.excluding(fixations)
    if len(others) == 0:
        raise EmptyNegativePool("no pooled fixations from other images")
    positives = pred.values[fixations.ys, fixations.xs]
    pool = pred.values[others.ys, others.xs]
    draw = min(positives.size, pool.size)
    rng = np.random.default_rng(seed)
    scores = [
        threshold_sweep_auc(positives, rng.choice(pool, size=draw, replace=False))
        for _ in range(splits)
    ]
    return float(np.mean(scores))

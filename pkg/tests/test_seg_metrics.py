import numpy as np
import pytest

from camobench.core.maps import BinaryMask, ScalarMap
from camobench.errors import DimensionMismatch, EmptyGroundTruth
from camobench.metrics.segmentation import (
    adaptive_threshold,
    e_measure,
    f_measure,
    mae,
    s_measure,
)

GT_4x4 = np.array(
    [
        [0, 0, 0, 0],
        [0, 1, 1, 0],
        [0, 1, 1, 1],
        [0, 0, 0, 0],
    ],
    dtype=bool,
)


def _ssim_reference(x: np.ndarray, y: np.ndarray) -> float:
    """Straight-line block structural similarity, written from the formula."""
    eps = np.finfo(np.float64).eps
    n = x.size
    mx, my = x.mean(), y.mean()
    if n > 1:
        vx = sum((v - mx) ** 2 for v in x.ravel()) / (n - 1)
        vy = sum((v - my) ** 2 for v in y.ravel()) / (n - 1)
        cxy = sum((a - mx) * (b - my) for a, b in zip(x.ravel(), y.ravel())) / (n - 1)
    else:
        vx = vy = cxy = 0.0
    alpha = 4 * mx * my * cxy
    beta = (mx**2 + my**2) * (vx + vy)
    if alpha != 0:
        return alpha / (beta + eps)
    return 1.0 if beta == 0 else 0.0


def _s_measure_reference(pred: np.ndarray, gt: np.ndarray) -> float:
    eps = np.finfo(np.float64).eps

    def similarity(values):
        mean = values.mean()
        std = values.std(ddof=1)
        return 2 * mean / (mean**2 + 1 + std + eps)

    mu = gt.mean()
    s_object = mu * similarity(pred[gt]) + (1 - mu) * similarity(1 - pred[~gt])

    ys, xs = np.nonzero(gt)
    cx, cy = int(round(xs.mean())) + 1, int(round(ys.mean())) + 1
    h, w = gt.shape
    s_region = 0.0
    for rows in (slice(0, cy), slice(cy, h)):
        for cols in (slice(0, cx), slice(cx, w)):
            p, g = pred[rows, cols], gt[rows, cols].astype(float)
            if p.size:
                s_region += p.size / (h * w) * _ssim_reference(p, g)
    return 0.5 * s_object + 0.5 * s_region


def _e_measure_reference(binary: np.ndarray, gt: np.ndarray) -> float:
    g = gt.astype(float)
    b = binary.astype(float)
    total = 0.0
    for pg, pb in zip((g - g.mean()).ravel(), (b - b.mean()).ravel()):
        xi = 2 * pg * pb / (pg * pg + pb * pb + 1e-12)
        total += (xi + 1) ** 2 / 4
    return total / g.size


class TestMae:
    def test_identity(self):
        assert mae(BinaryMask(GT_4x4).as_map(), BinaryMask(GT_4x4)) == 0.0

    def test_extremal(self):
        assert mae(ScalarMap(np.ones((3, 3))), BinaryMask(np.zeros((3, 3), dtype=bool))) == 1.0

    def test_diagonal(self):
        pred = ScalarMap(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert mae(pred, BinaryMask(np.zeros((2, 2), dtype=bool))) == 0.5

    def test_dims(self):
        with pytest.raises(DimensionMismatch):
            mae(ScalarMap(np.ones((2, 3))), BinaryMask(np.ones((3, 2), dtype=bool)))


class TestFMeasure:
    def test_perfect(self):
        assert f_measure(BinaryMask(GT_4x4).as_map(), BinaryMask(GT_4x4)) == pytest.approx(1.0)

    def test_empty_prediction(self):
        assert f_measure(ScalarMap(np.zeros((4, 4))), BinaryMask(GT_4x4)) == 0.0

    def test_precise_half_recall(self):
        gt = np.zeros((4, 4), dtype=bool)
        gt[0, :] = True
        pred = np.zeros((4, 4))
        pred[0, :2] = 1.0
        assert f_measure(ScalarMap(pred), BinaryMask(gt)) == pytest.approx(0.65 / 0.8)

    def test_empty_ground_truth(self):
        with pytest.raises(EmptyGroundTruth):
            f_measure(ScalarMap(np.ones((2, 2))), BinaryMask(np.zeros((2, 2), dtype=bool)))

    def test_threshold_capped_at_one(self):
        assert adaptive_threshold(ScalarMap(np.full((2, 2), 0.8))) == 1.0


class TestSMeasure:
    def test_self_similarity(self):
        assert s_measure(BinaryMask(GT_4x4).as_map(), BinaryMask(GT_4x4)) == pytest.approx(1.0)

    def test_empty_gt_convention(self):
        empty = BinaryMask(np.zeros((4, 4), dtype=bool))
        assert s_measure(ScalarMap(np.zeros((4, 4))), empty) == 1.0
        assert s_measure(ScalarMap(np.full((4, 4), 0.25)), empty) == pytest.approx(0.75)

    def test_full_gt_convention(self):
        full = BinaryMask(np.ones((4, 4), dtype=bool))
        assert s_measure(ScalarMap(np.full((4, 4), 0.6)), full) == pytest.approx(0.6)

    def test_complement_matches_reference(self):
        pred = 1.0 - GT_4x4.astype(float)
        expected = float(np.clip(_s_measure_reference(pred, GT_4x4), 0.0, 1.0))
        got = s_measure(ScalarMap(pred), BinaryMask(GT_4x4))
        assert got == pytest.approx(expected, abs=1e-12)
        assert got < 0.5

    def test_soft_prediction_matches_reference(self):
        pred = np.random.default_rng(7).random((4, 4))
        expected = float(np.clip(_s_measure_reference(pred, GT_4x4), 0.0, 1.0))
        assert s_measure(ScalarMap(pred), BinaryMask(GT_4x4)) == pytest.approx(expected, abs=1e-12)

    def test_range(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            gt = rng.random((8, 8)) > 0.6
            if gt.all() or not gt.any():
                continue
            value = s_measure(ScalarMap(rng.random((8, 8))), BinaryMask(gt))
            assert 0.0 <= value <= 1.0


class TestEMeasure:
    def test_perfect(self):
        assert e_measure(BinaryMask(GT_4x4).as_map(), BinaryMask(GT_4x4)) == pytest.approx(1.0)

    def test_full_gt_convention(self):
        full = BinaryMask(np.ones((3, 3), dtype=bool))
        assert e_measure(ScalarMap(np.ones((3, 3))), full) == 1.0

    def test_empty_gt_convention(self):
        empty = BinaryMask(np.zeros((3, 3), dtype=bool))
        assert e_measure(ScalarMap(np.zeros((3, 3))), empty) == 1.0

    def test_complement_matches_reference(self):
        pred = 1.0 - GT_4x4.astype(float)
        binary = pred >= min(2 * pred.mean(), 1.0)
        expected = _e_measure_reference(binary, GT_4x4)
        assert e_measure(ScalarMap(pred), BinaryMask(GT_4x4)) == pytest.approx(expected, abs=1e-12)

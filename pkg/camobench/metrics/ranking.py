"""Camouflage-ranking metrics: r_MAE, Spearman, instance matching, Corr and penalties."""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import spearmanr

from camobench.core.instances import InstanceRecord, bbox_iou, paint_rank_map, union_mask
from camobench.core.maps import BinaryMask, Dims, RankMap, check_dims
from camobench.errors import DegenerateVector, EmptyInput, LengthMismatch, RankUnderpopulated
from camobench.metrics.segmentation import mae
from camobench.models import FOREGROUND_RANKS, MatchConfig, PenaltyMatrix, RankLabel

logger = logging.getLogger(__name__)


def spearman(a: Sequence[float], b: Sequence[float]) -> float:
    """Spearman correlation with average ranks for ties."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch(f"vectors of length {x.size} and {y.size}")
    if x.size < 2:
        raise DegenerateVector("need at least two observations")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateVector("rank correlation is undefined for a constant vector")
    rho = spearmanr(x, y).statistic
    return float(np.clip(rho, -1.0, 1.0))


def r_mae(pred: RankMap, gt: RankMap) -> float:
    """Mean absolute difference of per-pixel rank codes."""
    check_dims(pred.dims, gt.dims)
    diff = pred.labels.astype(np.int16) - gt.labels.astype(np.int16)
    return float(np.abs(diff).mean())


def rank_prediction_to_map(predictions: Sequence[InstanceRecord], dims: Dims) -> RankMap:
    return paint_rank_map(predictions, dims)


def ranking_mae(predictions: Sequence[InstanceRecord], gt: BinaryMask) -> float:
    """Segmentation MAE of the union of predicted instance masks."""
    return mae(union_mask(predictions, gt.dims).as_map(), gt)


def match_instance(
    gt: InstanceRecord,
    predictions: Sequence[InstanceRecord],
    iou_threshold: float = 0.25,
) -> Optional[InstanceRecord]:
    """Highest-score prediction whose bbox IoU with ``gt`` exceeds the threshold.

    Equal scores go to the higher IoU, then to the earlier prediction. Predictions
    without a score rank below every scored one.
    """
    best: Optional[InstanceRecord] = None
    best_key: tuple[float, float] = (-np.inf, -np.inf)
    for pred in predictions:
        iou = bbox_iou(gt.box, pred.box)
        if iou <= iou_threshold:
            continue
        key = (pred.score if pred.score is not None else -1.0, iou)
        if key > best_key:
            best, best_key = pred, key
    return best


# -----------------------------------------------------------------------------
# Corr
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class RankedImage:
    """Ground-truth instances and one method's predictions for a single image."""

    image_id: str
    gt: Sequence[InstanceRecord]
    predictions: Sequence[InstanceRecord]


@dataclass
class CorrOutcome:
    value: float
    excluded: int
    pool_sizes: dict[str, int] = field(default_factory=dict)
    degenerate: int = 0
    samplings: int = 0


@dataclass
class MatchedPool:
    """Matched (gt rank, predicted rank) pairs grouped by gt rank."""

    by_rank: dict[RankLabel, list[RankLabel]]
    pairs: list[tuple[RankLabel, RankLabel]]
    excluded: int


def build_matched_pool(images: Iterable[RankedImage], iou_threshold: float) -> MatchedPool:
    by_rank: dict[RankLabel, list[RankLabel]] = {r: [] for r in FOREGROUND_RANKS}
    pairs: list[tuple[RankLabel, RankLabel]] = []
    excluded = 0
    for image in images:
        for inst in image.gt:
            if inst.rank is None or inst.rank not in by_rank:
                continue
            match = match_instance(inst, image.predictions, iou_threshold)
            if match is None or match.rank is None:
                excluded += 1
                continue
            by_rank[inst.rank].append(match.rank)
            pairs.append((match.rank, inst.rank))
    if excluded:
        logger.info("%d ground-truth instances had no match and were excluded", excluded)
    return MatchedPool(by_rank, pairs, excluded)


def corr(images: Iterable[RankedImage], config: MatchConfig | None = None) -> CorrOutcome:
    """Mean Spearman correlation over seeded draws of one matched instance per rank.

    Each of ``repeats`` rounds averages ``samples`` draws; the result is the mean
    of the round averages. Draw (m, n) uses its own generator seeded from
    (seed, m, n), so the value does not depend on evaluation order.
    """
    config = config or MatchConfig()
    seed = config.seed if config.seed is not None else 0
    pool = build_matched_pool(images, config.iou_threshold)
    for rank in FOREGROUND_RANKS:
        if not pool.by_rank[rank]:
            raise RankUnderpopulated(rank.name)

    gt_codes = np.array([int(r) for r in FOREGROUND_RANKS], dtype=np.float64)
    candidates = [np.array([int(p) for p in pool.by_rank[r]]) for r in FOREGROUND_RANKS]
    degenerate = 0
    round_means = []
    for m in range(config.repeats):
        values = []
        for n in range(config.samples):
            rng = np.random.default_rng([seed, m, n])
            predicted = np.array(
                [c[rng.integers(c.size)] for c in candidates], dtype=np.float64
            )
            if np.ptp(predicted) == 0:
                degenerate += 1
                values.append(0.0)
            else:
                values.append(spearman(gt_codes, predicted))
        round_means.append(float(np.mean(values)))

    return CorrOutcome(
        value=float(np.mean(round_means)),
        excluded=pool.excluded,
        pool_sizes={r.name: len(pool.by_rank[r]) for r in FOREGROUND_RANKS},
        degenerate=degenerate,
        samplings=config.repeats * config.samples,
    )


# -----------------------------------------------------------------------------
# Penalty matrix
# -----------------------------------------------------------------------------


def penalty_lookup(matrix: PenaltyMatrix, predicted: RankLabel, gt: RankLabel) -> float:
    row = matrix.order.index(RankLabel.parse(predicted).name)
    col = matrix.order.index(RankLabel.parse(gt).name)
    return float(matrix.values[row][col])


def rank_penalty(
    pairs: Iterable[tuple[RankLabel, RankLabel]], matrix: PenaltyMatrix
) -> float:
    """Mean misranking cost over (predicted, gt) pairs."""
    costs = [penalty_lookup(matrix, pred, gt) for pred, gt in pairs]
    if not costs:
        raise EmptyInput("no matched instance pairs")
    return float(np.mean(costs))

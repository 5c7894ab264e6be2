"""Segmentation, localization and ranking metrics."""

from camobench.metrics.fixation import (
    auc_borji,
    auc_judd,
    cc,
    kld,
    nss,
    sauc,
    sim,
    threshold_sweep_auc,
)
from camobench.metrics.ranking import (
    CorrOutcome,
    RankedImage,
    build_matched_pool,
    corr,
    match_instance,
    penalty_lookup,
    r_mae,
    rank_penalty,
    rank_prediction_to_map,
    ranking_mae,
    spearman,
)
from camobench.metrics.segmentation import (
    adaptive_binarize,
    adaptive_threshold,
    e_measure,
    f_measure,
    mae,
    s_measure,
)
from camobench.metrics.transport import downsample, emd, transport_cost

__all__ = [
    "CorrOutcome",
    "RankedImage",
    "adaptive_binarize",
    "adaptive_threshold",
    "auc_borji",
    "auc_judd",
    "build_matched_pool",
    "cc",
    "corr",
    "downsample",
    "e_measure",
    "emd",
    "f_measure",
    "kld",
    "mae",
    "match_instance",
    "nss",
    "penalty_lookup",
    "r_mae",
    "rank_penalty",
    "rank_prediction_to_map",
    "ranking_mae",
    "s_measure",
    "sauc",
    "sim",
    "spearman",
    "threshold_sweep_auc",
]

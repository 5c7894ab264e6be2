"""Normalized delays to camouflage ranks."""

from collections import Counter
from typing import Sequence

import numpy as np

from camobench.errors import InvalidConfig
from camobench.models import FOREGROUND_RANKS, BinningPolicy, BuilderConfig, DelayRecord, RankLabel


def _quintile_bins(values: np.ndarray) -> np.ndarray:
    """Equal-frequency bins 0..4; a tied group takes the bin of its lowest position."""
    n = values.size
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    first_position = np.searchsorted(sorted_values, sorted_values, side="left")
    bins_sorted = (5 * first_position) // n
    bins = np.empty(n, dtype=np.int64)
    bins[order] = bins_sorted
    return bins


def _threshold_bins(values: np.ndarray, thresholds: Sequence[float]) -> np.ndarray:
    # side="left": a value equal to a threshold stays in the easier bin
    return np.searchsorted(np.asarray(thresholds, dtype=np.float64), values, side="left")


def assign_ranks(
    records: Sequence[DelayRecord],
    config: BuilderConfig | None = None,
) -> list[DelayRecord]:
    """Dataset-global rank assignment. Failure-forced records are HD."""
    config = config or BuilderConfig()
    if any(r.normalized is None for r in records):
        raise InvalidConfig("assign_ranks requires normalized delays; run normalize_delays first")

    scored = [i for i, r in enumerate(records) if not r.failure_forced]
    values = np.array([records[i].normalized for i in scored], dtype=np.float64)
    bins = np.empty(0, dtype=np.int64)
    if values.size:
        if config.binning == BinningPolicy.THRESHOLDS:
            assert config.thresholds is not None
            bins = _threshold_bins(values, config.thresholds)
        else:
            bins = _quintile_bins(values)
    rank_of = {i: FOREGROUND_RANKS[int(b)] for i, b in zip(scored, bins)}

    return [
        r.model_copy(update={"rank": RankLabel.HD if r.failure_forced else rank_of[i]})
        for i, r in enumerate(records)
    ]


def rank_distribution(records: Sequence[DelayRecord]) -> dict[str, int]:
    """Instance count per foreground rank, ES..HD order."""
    counts = Counter(r.rank for r in records if r.rank is not None)
    return {rank.name: counts.get(rank, 0) for rank in FOREGROUND_RANKS}

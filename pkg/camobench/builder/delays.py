"""Detection delays from fixation sessions.

The delay of observer j on instance i is the median time from image onset to
the observer's fixations on the instance. Instances are then aggregated across
observers under a majority rule and normalized dataset-wide.
"""

import logging
from typing import Iterable, Optional, Sequence

import numpy as np

from camobench.core.maps import BinaryMask, check_dims
from camobench.errors import AllFailed, EmptyInput, InvalidConfig, NoObservers
from camobench.models import BuilderConfig, DelayRecord, FixationSession, NormalizationPolicy

logger = logging.getLogger(__name__)

DelayOutcome = Optional[float]
"""Delay in ms, or None when the observer never fixated the instance."""


def median(values: Iterable[float]) -> float:
    """Middle of the sorted values; mean of the two middle ones for even counts."""
    data = np.asarray(list(values), dtype=np.float64)
    if data.size == 0:
        raise EmptyInput("median of an empty sequence")
    return float(np.median(data))


def per_observer_delay(session: FixationSession, instance: BinaryMask) -> DelayOutcome:
    if session.width is not None and session.height is not None:
        check_dims((session.width, session.height), instance.dims)
    width, height = instance.dims
    deltas = [
        e.timestamp_ms - session.t0_ms
        for e in session.events
        if e.x < width and e.y < height and instance.bits[e.y, e.x]
    ]
    if not deltas:
        return None
    return median(deltas)


def aggregate_instance_delay(
    outcomes: Sequence[DelayOutcome],
    config: BuilderConfig,
    image_id: str = "",
    instance_id: str = "",
) -> DelayRecord:
    """Combine observer outcomes; too few detections force the hard-sample convention."""
    if not outcomes:
        raise NoObservers(f"no observer outcomes for {image_id}/{instance_id}")
    if config.majority_threshold > len(outcomes):
        raise InvalidConfig(
            f"majority threshold {config.majority_threshold} exceeds "
            f"observer count {len(outcomes)} for {image_id}/{instance_id}"
        )
    detected = [o for o in outcomes if o is not None]
    if len(detected) >= config.majority_threshold:
        return DelayRecord(
            image_id=image_id,
            instance_id=instance_id,
            outcomes=tuple(outcomes),
            delay_ms=median(detected),
        )
    logger.debug(
        "%s/%s detected by %d of %d observers; forcing hard sample",
        image_id,
        instance_id,
        len(detected),
        len(outcomes),
    )
    return DelayRecord(
        image_id=image_id,
        instance_id=instance_id,
        outcomes=tuple(outcomes),
        normalized=1.0,
        failure_forced=True,
    )


def normalize_delays(
    records: Sequence[DelayRecord],
    policy: NormalizationPolicy = NormalizationPolicy.MAX,
) -> list[DelayRecord]:
    """Fill normalized delays. Dataset-global: needs every record at once."""
    if not records:
        return []
    detected = [r.delay_ms for r in records if not r.failure_forced and r.delay_ms is not None]
    if not detected:
        raise AllFailed("every instance is failure-forced; nothing to normalize against")
    high = max(detected)
    low = min(detected) if policy == NormalizationPolicy.MIN_MAX else 0.0
    span = high - low

    out: list[DelayRecord] = []
    for record in records:
        if record.failure_forced or record.delay_ms is None:
            out.append(record.model_copy(update={"normalized": 1.0}))
            continue
        if span > 0:
            value = (record.delay_ms - low) / span
        elif policy == NormalizationPolicy.MIN_MAX or high > 0:
            value = 1.0
        else:
            # every detected delay is zero
            value = 0.0
        out.append(record.model_copy(update={"normalized": float(np.clip(value, 0.0, 1.0))}))
    return out

"""Attention transforms over predicted segmentation, localization and rank maps."""

import json
import logging
from pathlib import Path

import numpy as np

from camobench.core.imageio import save_scalar_map
from camobench.core.maps import BinaryMask, MapKind, ScalarMap, check_dims
from camobench.errors import UnwritablePath

logger = logging.getLogger(__name__)


def reverse_attention(s_b: ScalarMap, s_l: ScalarMap) -> ScalarMap:
    """exp(|s_b - s_l|): large where segmentation and localization disagree."""
    check_dims(s_b.dims, s_l.dims)
    return ScalarMap(np.exp(np.abs(s_b.values - s_l.values)))


def ranking_attention(
    s_r: ScalarMap,
    foreground: BinaryMask,
    literal: bool = False,
) -> ScalarMap:
    """Rank-based attention.

    Default: 1 + exp(-s_r) on the foreground and 1 on the background, so harder
    (smaller-code) instances get more attention. ``literal`` evaluates
    1 + exp(-[s_r > 0]) at every pixel instead.
    """
    check_dims(s_r.dims, foreground.dims)
    if literal:
        indicator = (s_r.values > 0).astype(np.float64)
        return ScalarMap(1.0 + np.exp(-indicator))
    values = np.ones(s_r.values.shape, dtype=np.float64)
    fg = foreground.bits
    values[fg] = 1.0 + np.exp(-s_r.values[fg])
    return ScalarMap(values)


def attention_to_png(m: ScalarMap, path: str | Path, mode: str) -> tuple[Path, Path]:
    """Write an 8-bit min-max rendering plus a ``.json`` sidecar with the raw range.

    A constant map renders all-zero.
    """
    path = Path(path)
    lo, hi = float(m.values.min()), float(m.values.max())
    span = hi - lo
    scaled = (m.values - lo) / span if span > 0 else np.zeros_like(m.values)
    png = save_scalar_map(ScalarMap(np.clip(scaled, 0.0, 1.0), MapKind.UNIT), path)
    sidecar = path.with_suffix(".json")
    try:
        sidecar.write_text(json.dumps({"max": hi, "min": lo, "mode": mode}, indent=2, sort_keys=True))
    except OSError as e:
        raise UnwritablePath(f"cannot write {sidecar}: {e}", path=str(sidecar)) from e
    logger.debug("wrote %s attention map to %s", mode, png)
    return png, sidecar

"""Fixation (localization) maps and gray-scale rank maps."""

from typing import Iterable, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter

from camobench.core.instances import InstanceRecord, paint_rank_map
from camobench.core.maps import Dims, MapKind, RankMap, ScalarMap
from camobench.models import FixationSession


def fixation_density(
    sessions: Iterable[FixationSession],
    dims: Dims,
    sigma: float,
    truncate: float = 3.0,
) -> np.ndarray:
    """Unit impulse per event across observers, blurred with an isotropic Gaussian."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    width, height = dims
    impulses = np.zeros((height, width), dtype=np.float64)
    for session in sessions:
        if not session.events:
            continue
        xs = np.fromiter((e.x for e in session.events), dtype=np.int64)
        ys = np.fromiter((e.y for e in session.events), dtype=np.int64)
        inside = (xs < width) & (ys < height)
        np.add.at(impulses, (ys[inside], xs[inside]), 1.0)
    return gaussian_filter(impulses, sigma=sigma, mode="constant", cval=0.0, truncate=truncate)


def render_fixation_map(
    sessions: Iterable[FixationSession],
    dims: Dims,
    sigma: float,
    truncate: float = 3.0,
) -> ScalarMap:
    """Blurred fixation density rescaled to a maximum of 1 (empty stays all-zero)."""
    density = fixation_density(sessions, dims, sigma, truncate)
    peak = density.max()
    if peak > 0:
        density = density / peak
    return ScalarMap(np.clip(density, 0.0, 1.0), MapKind.UNIT)


def render_rank_map(instances: Sequence[InstanceRecord], dims: Dims) -> RankMap:
    return paint_rank_map(instances, dims)

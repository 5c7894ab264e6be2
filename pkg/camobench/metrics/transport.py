"""Earth mover's distance between two 2-D mass distributions.

Both maps are area-averaged onto at most ``grid`` x ``grid`` cells and the exact
transportation problem is solved with POT's network simplex. Mass shared by the
two distributions at the same cell is cancelled first; with a metric ground
distance this leaves the optimum unchanged and keeps the problem small.
"""

import logging

import numpy as np
import ot

from camobench.core.maps import ScalarMap, check_dims, to_distribution
from camobench.errors import TransportFailed

logger = logging.getLogger(__name__)

_NEGLIGIBLE_MASS = 1e-15
_MAX_ITERATIONS = 1_000_000


def _overlap_matrix(length: int, cells: int) -> np.ndarray:
    """(cells, length) matrix: overlap of pixel j with cell i, in pixel units."""
    edges = np.linspace(0.0, float(length), cells + 1)
    lo = np.maximum(edges[:-1, None], np.arange(length)[None, :])
    hi = np.minimum(edges[1:, None], np.arange(1, length + 1)[None, :])
    return np.clip(hi - lo, 0.0, None)


def downsample(values: np.ndarray, grid: int) -> np.ndarray:
    """Sum mass into min(grid, dim) cells per axis, splitting pixels that straddle cells."""
    height, width = values.shape
    rows = _overlap_matrix(height, min(grid, height))
    cols = _overlap_matrix(width, min(grid, width))
    return rows @ values @ cols.T


def _cell_centers(length: int, cells: int, pixel_units: bool) -> np.ndarray:
    centers = np.arange(cells) + 0.5
    return centers * (length / cells) if pixel_units else centers


def transport_cost(
    p: np.ndarray,
    q: np.ndarray,
    xs: np.ndarray,
    ys: np.ndarray,
) -> float:
    """Optimal cost of moving ``p`` onto ``q`` (same total mass) on a cell lattice.

    ``xs``/``ys`` are the cell-center coordinates along the width and height axes.
    """
    common = np.minimum(p, q)
    supply = (p - common).ravel()
    demand = (q - common).ravel()
    sources = np.flatnonzero(supply > _NEGLIGIBLE_MASS)
    sinks = np.flatnonzero(demand > _NEGLIGIBLE_MASS)
    if sources.size == 0 or sinks.size == 0:
        return 0.0
    a = supply[sources]
    b = demand[sinks]
    b = b * (a.sum() / b.sum())

    width = xs.size
    sy, sx = np.divmod(sources, width)
    ty, tx = np.divmod(sinks, width)
    cost = np.hypot(xs[sx][:, None] - xs[tx][None, :], ys[sy][:, None] - ys[ty][None, :])

    value, log = ot.emd2(
        np.ascontiguousarray(a, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        np.ascontiguousarray(cost, dtype=np.float64),
        numItermax=_MAX_ITERATIONS,
        log=True,
    )
    # 1 is OPTIMAL in POT's network simplex result codes
    if log["result_code"] != 1:
        raise TransportFailed(f"transport solver stopped: {log['warning']}")
    return float(max(value, 0.0))


def emd(
    p: ScalarMap,
    q: ScalarMap,
    grid: int = 32,
    pixel_units: bool = False,
) -> float:
    """Earth mover's distance between two nonnegative maps after mass normalization.

    Distances are Euclidean between cell centers, in cell units unless
    ``pixel_units`` is set.
    """
    check_dims(p.dims, q.dims)
    if grid < 1:
        raise ValueError("grid must be >= 1")
    a = downsample(to_distribution(p).values, grid)
    b = downsample(to_distribution(q).values, grid)
    a /= a.sum()
    b /= b.sum()
    height, width = p.values.shape
    xs = _cell_centers(width, a.shape[1], pixel_units)
    ys = _cell_centers(height, a.shape[0], pixel_units)
    return transport_cost(a, b, xs, ys)

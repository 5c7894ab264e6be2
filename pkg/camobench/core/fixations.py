"""Discrete fixation locations consumed by the location-based metrics."""

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from camobench.core.maps import BinaryMask, Dims
from camobench.models import FixationSession


@dataclass(frozen=True, eq=False)
class FixationPointSet:
    """Deduplicated in-bounds (x, y) pixels, stored sorted in raster order."""

    dims: Dims
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        width, height = self.dims
        xs = np.asarray(self.xs, dtype=np.int64).ravel()
        ys = np.asarray(self.ys, dtype=np.int64).ravel()
        if xs.shape != ys.shape:
            raise ValueError("xs and ys must have the same length")
        if xs.size and (xs.min() < 0 or ys.min() < 0 or xs.max() >= width or ys.max() >= height):
            raise ValueError(f"fixation points must lie inside {self.dims}")
        flat = np.unique(ys * width + xs)
        ys, xs = np.divmod(flat, width)
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_points(cls, points: Iterable[tuple[int, int]], dims: Dims) -> "FixationPointSet":
        pts = list(points)
        if not pts:
            return cls(dims, np.empty(0, np.int64), np.empty(0, np.int64))
        xs, ys = zip(*pts)
        return cls(dims, np.array(xs), np.array(ys))

    @classmethod
    def from_sessions(cls, sessions: Iterable[FixationSession], dims: Dims) -> "FixationPointSet":
        return cls.from_points(((e.x, e.y) for s in sessions for e in s.events), dims)

    @classmethod
    def from_mask(cls, mask: BinaryMask) -> "FixationPointSet":
        ys, xs = np.nonzero(mask.bits)
        return cls(mask.dims, xs, ys)

    def __len__(self) -> int:
        return int(self.xs.size)

    @property
    def flat_indices(self) -> np.ndarray:
        return self.ys * self.dims[0] + self.xs

    def to_mask(self) -> np.ndarray:
        width, height = self.dims
        bits = np.zeros((height, width), dtype=bool)
        bits[self.ys, self.xs] = True
        return bits

    def rescaled(self, dims: Dims) -> "FixationPointSet":
        """Map points proportionally onto another image size."""
        (w0, h0), (w1, h1) = self.dims, dims
        xs = np.minimum((self.xs * w1) // w0, w1 - 1)
        ys = np.minimum((self.ys * h1) // h0, h1 - 1)
        return FixationPointSet(dims, xs, ys)

    def union(self, other: "FixationPointSet") -> "FixationPointSet":
        if tuple(other.dims) != tuple(self.dims):
            other = other.rescaled(self.dims)
        return FixationPointSet(
            self.dims, np.concatenate([self.xs, other.xs]), np.concatenate([self.ys, other.ys])
        )

    def excluding(self, other: "FixationPointSet") -> "FixationPointSet":
        keep = ~np.isin(self.flat_indices, other.flat_indices)
        return FixationPointSet(self.dims, self.xs[keep], self.ys[keep])

"""Dense 2-D carriers: real-valued maps, binary masks and rank maps.

All arrays are (height, width), row-major, origin top-left, and read-only
after construction.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from camobench.errors import DegenerateMap, DimensionMismatch, ZeroMass
from camobench.models import RankLabel

Dims = tuple[int, int]
"""(width, height) in pixels."""


class MapKind(str, Enum):
    RAW = "raw"
    UNIT = "unit"
    DISTRIBUTION = "distribution"


def _frozen(array: np.ndarray, dtype: type) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ScalarMap:
    """Real-valued map (prediction, fixation density, attention)."""

    values: np.ndarray
    kind: MapKind = MapKind.RAW

    def __post_init__(self) -> None:
        values = _frozen(self.values, np.float64)
        if values.ndim != 2 or values.size == 0:
            raise ValueError(f"map must be a nonempty 2-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("map values must be finite")
        if self.kind == MapKind.UNIT and (values.min() < 0 or values.max() > 1):
            raise ValueError("unit-normalized map values must lie in [0, 1]")
        if self.kind == MapKind.DISTRIBUTION and (
            values.min() < 0 or abs(values.sum() - 1.0) > 1e-9
        ):
            raise ValueError("distribution must be nonnegative and sum to 1")
        object.__setattr__(self, "values", values)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> Dims:
        return (self.width, self.height)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    bits: np.ndarray

    def __post_init__(self) -> None:
        raw = np.asarray(self.bits)
        if raw.ndim != 2 or raw.size == 0:
            raise ValueError(f"mask must be a nonempty 2-D array, got shape {raw.shape}")
        if raw.dtype != bool and not np.all((raw == 0) | (raw == 1)):
            raise ValueError("mask values must be 0 or 1")
        object.__setattr__(self, "bits", _frozen(raw, bool))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def dims(self) -> Dims:
        return (self.width, self.height)

    @property
    def area(self) -> int:
        return int(np.count_nonzero(self.bits))

    def as_map(self) -> ScalarMap:
        return ScalarMap(self.bits.astype(np.float64), MapKind.UNIT)


@dataclass(frozen=True, eq=False)
class RankMap:
    """Per-pixel RankLabel codes (ES=1 ... HD=5, BG=6)."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        labels = _frozen(self.labels, np.uint8)
        if labels.ndim != 2 or labels.size == 0:
            raise ValueError(f"rank map must be a nonempty 2-D array, got shape {labels.shape}")
        if labels.min() < RankLabel.ES or labels.max() > RankLabel.BG:
            raise ValueError("rank map codes must lie in 1..6")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def background(cls, dims: Dims) -> "RankMap":
        width, height = dims
        return cls(np.full((height, width), int(RankLabel.BG), dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def dims(self) -> Dims:
        return (self.width, self.height)

    def foreground(self) -> BinaryMask:
        return BinaryMask(self.labels != RankLabel.BG)

    def as_map(self) -> ScalarMap:
        return ScalarMap(self.labels.astype(np.float64))


def check_dims(found: Dims, expected: Dims, path: str | None = None) -> None:
    if tuple(found) != tuple(expected):
        raise DimensionMismatch(tuple(found), tuple(expected), path=path)


# -----------------------------------------------------------------------------
# Normalization
# -----------------------------------------------------------------------------


def to_distribution(m: ScalarMap) -> ScalarMap:
    """Divide by the total mass."""
    if m.values.min() < 0:
        raise ValueError("distribution input must be nonnegative")
    total = m.values.sum()
    if total <= 0:
        raise ZeroMass("map has zero total mass")
    return ScalarMap(m.values / total, MapKind.DISTRIBUTION)


def z_score(m: ScalarMap) -> ScalarMap:
    """Standardize with the population (divide-by-N) standard deviation."""
    if np.ptp(m.values) == 0:
        raise DegenerateMap("constant map has zero standard deviation")
    std = m.values.std()
    return ScalarMap((m.values - m.values.mean()) / std)

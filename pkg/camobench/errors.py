"""Error hierarchy shared by every camobench module.

Each error carries a ``kind`` (its class name) and, when known, the input ``path``
so the harness can record error rows without inspecting messages.
"""

from typing import Optional


class CamoBenchError(Exception):
    """Base class for all camobench errors."""

    def __init__(self, message: str = "", path: Optional[str] = None) -> None:
        super().__init__(message or self.__class__.__name__)
        self.path = path

    @property
    def kind(self) -> str:
        return self.__class__.__name__


class ManifestError(CamoBenchError, ValueError):
    """Manifest unreadable or inconsistent. Fatal for a run."""


class InvalidConfig(CamoBenchError, ValueError):
    """Configuration value outside its allowed range."""


# -----------------------------------------------------------------------------
# I/O
# -----------------------------------------------------------------------------


class FileMissing(CamoBenchError):
    pass


class UnsupportedPixelFormat(CamoBenchError, ValueError):
    pass


class UnwritablePath(CamoBenchError):
    pass


class DimensionMismatch(CamoBenchError, ValueError):
    """Two inputs (or an input and the manifest) disagree on (width, height)."""

    def __init__(
        self,
        found: tuple[int, int],
        expected: tuple[int, int],
        path: Optional[str] = None,
    ) -> None:
        super().__init__(f"dimensions {found} do not match expected {expected}", path=path)
        self.found = found
        self.expected = expected


# -----------------------------------------------------------------------------
# Numerical preconditions
# -----------------------------------------------------------------------------


class ZeroMass(CamoBenchError, ValueError):
    pass


class DegenerateMap(CamoBenchError, ValueError):
    pass


class NotNormalized(CamoBenchError, ValueError):
    pass


class EmptyInput(CamoBenchError, ValueError):
    pass


class LengthMismatch(CamoBenchError, ValueError):
    pass


class DegenerateVector(CamoBenchError, ValueError):
    pass


# -----------------------------------------------------------------------------
# Dataset construction
# -----------------------------------------------------------------------------


class NoObservers(CamoBenchError, ValueError):
    pass


class AllFailed(CamoBenchError, ValueError):
    pass


class MissingRank(CamoBenchError, ValueError):
    pass


# -----------------------------------------------------------------------------
# Metrics
# -----------------------------------------------------------------------------


class EmptyGroundTruth(CamoBenchError, ValueError):
    pass


class EmptyFixations(CamoBenchError, ValueError):
    pass


class AllFixated(CamoBenchError, ValueError):
    pass


class InsufficientNegatives(CamoBenchError, ValueError):
    pass


class EmptyNegativePool(CamoBenchError, ValueError):
    pass


class TransportFailed(CamoBenchError):
    """The transport solver did not reach an optimum."""


class RankUnderpopulated(CamoBenchError, ValueError):
    def __init__(self, rank: str) -> None:
        super().__init__(f"no matchable instance with rank {rank}")
        self.rank = rank


# -----------------------------------------------------------------------------
# Attributes
# -----------------------------------------------------------------------------


class TooManySuperpixels(CamoBenchError, ValueError):
    pass


class NoForeground(CamoBenchError, ValueError):
    pass


class NoBackground(CamoBenchError, ValueError):
    pass


class EmptyMask(CamoBenchError, ValueError):
    pass


class DegenerateBoundary(CamoBenchError, ValueError):
    pass


# -----------------------------------------------------------------------------
# Harness
# -----------------------------------------------------------------------------


class EvaluationAborted(CamoBenchError):
    """Raised in strict mode at the first errored row."""

"""Pydantic models for configuration, manifests, fixation logs and delay records."""

import json
from enum import Enum, IntEnum
from importlib import resources
from pathlib import Path
from typing import Annotated, Any, Literal, Optional

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    PrivateAttr,
    field_validator,
    model_validator,
)

from camobench.errors import InvalidConfig, ManifestError


class RankLabel(IntEnum):
    """Camouflage rank of a pixel or instance. Codes are fixed."""

    ES = 1
    M1 = 2
    M2 = 3
    M3 = 4
    HD = 5
    BG = 6

    @classmethod
    def parse(cls, value: Any) -> "RankLabel":
        if isinstance(value, RankLabel):
            return value
        if isinstance(value, str):
            try:
                return cls[value.strip().upper()]
            except KeyError as e:
                raise ValueError(f"Unknown rank '{value}'. Must be one of {[r.name for r in cls]}") from e
        return cls(int(value))

    @property
    def gray(self) -> int:
        """8-bit gray code used in rank-map PNGs (BG=0, ES=51, ..., HD=255)."""
        return 0 if self is RankLabel.BG else 51 * int(self)


FOREGROUND_RANKS: tuple[RankLabel, ...] = (
    RankLabel.ES,
    RankLabel.M1,
    RankLabel.M2,
    RankLabel.M3,
    RankLabel.HD,
)

RankName = Annotated[
    RankLabel,
    BeforeValidator(RankLabel.parse),
    PlainSerializer(lambda r: r.name, return_type=str),
]


# -----------------------------------------------------------------------------
# Fixation logs
# -----------------------------------------------------------------------------


class FixationEvent(BaseModel):
    """One pre-classified fixation. Pixel origin is top-left."""

    model_config = ConfigDict(frozen=True)

    timestamp_ms: int = Field(..., description="Device clock, milliseconds")
    x: int = Field(..., ge=0)
    y: int = Field(..., ge=0)


class FixationSession(BaseModel):
    """One observer viewing one image."""

    model_config = ConfigDict(frozen=True)

    image_id: str
    observer_id: str
    t0_ms: int = Field(..., description="Image onset on the device clock")
    events: tuple[FixationEvent, ...] = ()
    width: Optional[int] = Field(default=None, gt=0)
    height: Optional[int] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def validate_events(self) -> "FixationSession":
        previous = self.t0_ms
        for event in self.events:
            if event.timestamp_ms < previous:
                raise ValueError(
                    f"events must be sorted and not precede t0 ({event.timestamp_ms} < {previous})"
                )
            previous = event.timestamp_ms
            if self.width is not None and event.x >= self.width:
                raise ValueError(f"x={event.x} outside width {self.width}")
            if self.height is not None and event.y >= self.height:
                raise ValueError(f"y={event.y} outside height {self.height}")
        return self


# -----------------------------------------------------------------------------
# Dataset builder
# -----------------------------------------------------------------------------


class NormalizationPolicy(str, Enum):
    """How aggregated delays are brought into [0, 1]."""

    MAX = "max"
    MIN_MAX = "min_max"


class BinningPolicy(str, Enum):
    """How normalized delays map to the five foreground ranks."""

    QUINTILE = "quintile"
    THRESHOLDS = "thresholds"


class DelayRecord(BaseModel):
    """Detection delay of one instance, from raw observer outcomes to a rank."""

    model_config = ConfigDict(frozen=True)

    image_id: str
    instance_id: str
    outcomes: tuple[Optional[float], ...] = Field(
        default=(),
        description="Per-observer delay in ms, None when the observer never fixated the instance",
    )
    delay_ms: Optional[float] = Field(default=None, ge=0)
    normalized: Optional[float] = Field(default=None, ge=0, le=1)
    failure_forced: bool = False
    rank: Optional[RankName] = None

    @model_validator(mode="after")
    def validate_failure(self) -> "DelayRecord":
        if any(o is not None and o < 0 for o in self.outcomes):
            raise ValueError("observer delays must be >= 0")
        if self.failure_forced and self.normalized != 1.0:
            raise ValueError("failure-forced records carry normalized delay 1")
        return self


class BuilderConfig(BaseModel):
    """Configuration for dataset construction from fixation logs."""

    model_config = ConfigDict(extra="forbid")

    majority_threshold: int = Field(
        default=4,
        description="Observers that must fixate an instance for its delay to count",
        ge=1,
    )
    sigma: Optional[float] = Field(
        default=None,
        description="Gaussian sigma in pixels for fixation maps (default: image width / 20)",
        gt=0,
    )
    truncate: float = Field(default=3.0, description="Kernel truncation in sigmas", gt=0)
    binning: BinningPolicy = Field(default=BinningPolicy.QUINTILE)
    thresholds: Optional[list[float]] = Field(
        default=None,
        description="Four ascending normalized-delay thresholds (binning=thresholds)",
    )
    normalization: NormalizationPolicy = Field(default=NormalizationPolicy.MAX)

    @field_validator("thresholds")
    @classmethod
    def validate_thresholds(cls, v: Optional[list[float]]) -> Optional[list[float]]:
        if v is None:
            return v
        if len(v) != 4 or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("thresholds must be four strictly ascending values")
        return v

    @model_validator(mode="after")
    def validate_binning(self) -> "BuilderConfig":
        if self.binning == BinningPolicy.THRESHOLDS and self.thresholds is None:
            raise ValueError("binning=thresholds requires thresholds")
        return self

    def sigma_for(self, width: int) -> float:
        return self.sigma if self.sigma is not None else width / 20.0


# -----------------------------------------------------------------------------
# Metrics
# -----------------------------------------------------------------------------


class MetricConfig(BaseModel):
    """Conventions for the segmentation and fixation metrics."""

    model_config = ConfigDict(extra="forbid")

    emd_grid: int = Field(default=32, ge=1, description="EMD downsample size per axis")
    emd_pixel_units: bool = Field(
        default=False, description="Report EMD in pixels instead of downsampled cells"
    )
    kld_eps: float = Field(default=2.220446e-16, gt=0)
    auc_splits: int = Field(default=100, ge=1)
    f_threshold_policy: Literal["adaptive-2mean"] = "adaptive-2mean"


class MatchConfig(BaseModel):
    """Instance matching and Corr sampling."""

    model_config = ConfigDict(extra="forbid")

    iou_threshold: float = Field(default=0.25, gt=0, le=1)
    samples: int = Field(default=100, ge=1, description="Samplings averaged per repeat (N)")
    repeats: int = Field(default=10, ge=1, description="Repeats of the N-average (M)")
    seed: Optional[int] = Field(
        default=None, ge=0, description="Corr seed; the run seed is used when unset"
    )


class ChiSquareMode(str, Enum):
    """How color and texture chi-square distances combine for background matching."""

    MEAN = "mean"
    COLOR = "color"
    TEXTURE = "texture"
    CONCAT = "concat"


class CenterDirection(str, Enum):
    """Corner-position comparison direction."""

    FAR = "far"
    NEAR = "near"


class AttributeConfig(BaseModel):
    """Parameters and thresholds for the fine-grained camouflage attributes."""

    model_config = ConfigDict(extra="forbid")

    slic_segments: int = Field(default=200, ge=1)
    slic_compactness: float = Field(default=10.0, gt=0)
    slic_iterations: int = Field(default=10, ge=1)
    color_bins: int = Field(default=32, ge=1)
    lbp_radius: int = Field(default=1, ge=1)
    lbp_neighbors: int = Field(default=8, ge=1)
    chi_mode: ChiSquareMode = Field(default=ChiSquareMode.MEAN)

    bm_threshold: float = Field(default=0.9, gt=0)
    cb_threshold: float = Field(default=0.12, gt=0)
    cb_measure: str = Field(default="gradient")
    cp_sigma: float = Field(default=0.35, gt=0)
    cp_direction: CenterDirection = Field(default=CenterDirection.FAR)
    dc_threshold: float = Field(default=0.35, gt=0)
    so_threshold: float = Field(default=0.02, gt=0)
    sa_mean_threshold: float = Field(default=0.7, gt=0)
    sa_iou_threshold: float = Field(default=0.5, gt=0)

    gabor_wavelength: float = Field(default=8.0, gt=0)
    gabor_sigma: float = Field(default=4.0, gt=0)
    gabor_aspect: float = Field(default=1.0, gt=0)
    gabor_phase: float = Field(default=0.0)
    boundary_smoothing: float = Field(default=2.0, gt=0)
    min_boundary_length: int = Field(default=8, ge=1)


class AttentionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    literal: bool = Field(
        default=False,
        description="Evaluate the indicator form 1 + exp(-[s_r > 0]) instead of 1 + exp(-s_r)",
    )


# -----------------------------------------------------------------------------
# Penalty matrix
# -----------------------------------------------------------------------------

PENALTY_ORDER: tuple[str, ...] = ("BG", "ES", "M1", "M2", "M3", "HD")


class PenaltyMatrix(BaseModel):
    """6x6 misranking cost table indexed (predicted, ground truth) in PENALTY_ORDER."""

    model_config = ConfigDict(frozen=True)

    order: list[str] = Field(default_factory=lambda: list(PENALTY_ORDER))
    values: list[list[float]]

    @field_validator("order")
    @classmethod
    def validate_order(cls, v: list[str]) -> list[str]:
        if tuple(v) != PENALTY_ORDER:
            raise ValueError(f"order must be {list(PENALTY_ORDER)}")
        return v

    @field_validator("values")
    @classmethod
    def validate_values(cls, v: list[list[float]]) -> list[list[float]]:
        if len(v) != 6 or any(len(row) != 6 for row in v):
            raise ValueError("penalty matrix must be 6x6")
        for i, row in enumerate(v):
            if any(x < 0 for x in row):
                raise ValueError("penalties must be nonnegative")
            if row[i] != 0:
                raise ValueError("penalty diagonal must be zero")
        return v

    @classmethod
    def linear(cls) -> "PenaltyMatrix":
        """Default policy: |m - n| / 5 over the 1-based order positions."""
        return cls(values=[[abs(m - n) / 5.0 for n in range(6)] for m in range(6)])

    @classmethod
    def from_json(cls, path: str | Path) -> "PenaltyMatrix":
        try:
            return cls.model_validate(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError, ValueError) as e:
            raise InvalidConfig(f"Invalid penalty matrix: {e}", path=str(path)) from e

    @classmethod
    def published(cls) -> "PenaltyMatrix":
        """Shipped matrix pinning the one published entry, w_p(M3, ES) = 0.4."""
        text = resources.files("camobench").joinpath("data/published_penalty.json").read_text()
        return cls.model_validate(json.loads(text))


class BenchConfig(BaseModel):
    """The `--config` document. Every section falls back to its defaults."""

    model_config = ConfigDict(extra="forbid")

    builder: BuilderConfig = Field(default_factory=BuilderConfig)
    metrics: MetricConfig = Field(default_factory=MetricConfig)
    match: MatchConfig = Field(default_factory=MatchConfig)
    attributes: AttributeConfig = Field(default_factory=AttributeConfig)
    attention: AttentionConfig = Field(default_factory=AttentionConfig)
    penalty_matrix: Optional[str] = Field(
        default=None,
        description="Penalty matrix JSON path; 'published' selects the shipped matrix",
    )

    @classmethod
    def load(cls, path: Optional[str | Path]) -> "BenchConfig":
        if path is None:
            return cls()
        try:
            return cls.model_validate(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError, ValueError) as e:
            raise InvalidConfig(f"Invalid config: {e}", path=str(path)) from e

    def penalty(self) -> PenaltyMatrix:
        if self.penalty_matrix is None:
            return PenaltyMatrix.linear()
        if self.penalty_matrix == "published":
            return PenaltyMatrix.published()
        return PenaltyMatrix.from_json(self.penalty_matrix)


# -----------------------------------------------------------------------------
# Manifest and prediction files
# -----------------------------------------------------------------------------


class InstanceEntry(BaseModel):
    """Ground-truth instance: mask path and (after dataset building) its rank."""

    mask: str
    rank: Optional[RankName] = None


class ManifestEntry(BaseModel):
    """One image of a dataset manifest. Paths are relative to the manifest directory."""

    id: Optional[str] = Field(default=None, description="Image id (default: image file stem)")
    image: str
    width: int = Field(..., gt=0)
    height: int = Field(..., gt=0)
    gt_mask: Optional[str] = None
    instances: list[InstanceEntry] = Field(default_factory=list)
    fixation_map: Optional[str] = None
    fixation_logs: list[str] = Field(default_factory=list)
    fixation_points: Optional[str] = Field(
        default=None, description="Binary PNG of fixation points, used when no logs are listed"
    )
    saliency_map: Optional[str] = None
    mm: Optional[bool] = None
    oc: Optional[bool] = None

    @property
    def image_id(self) -> str:
        return self.id or Path(self.image).stem

    @property
    def dims(self) -> tuple[int, int]:
        return (self.width, self.height)


class DatasetManifest(BaseModel):
    """Top-level manifest document."""

    dataset: str
    entries: list[ManifestEntry] = Field(default_factory=list)
    predictions: dict[str, str] = Field(
        default_factory=dict, description="Prediction root per method name"
    )

    _base_dir: Path = PrivateAttr(default=Path("."))

    @model_validator(mode="after")
    def validate_ids(self) -> "DatasetManifest":
        ids = [e.image_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("image ids must be unique within a manifest")
        return self

    @property
    def base_dir(self) -> Path:
        return self._base_dir

    def resolve(self, relative: str) -> Path:
        path = Path(relative)
        return path if path.is_absolute() else self._base_dir / path

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        path = Path(path)
        try:
            manifest = cls.model_validate(json.loads(path.read_text()))
        except (OSError, json.JSONDecodeError, ValueError) as e:
            raise ManifestError(f"Unreadable manifest: {e}", path=str(path)) from e
        manifest._base_dir = path.parent
        return manifest

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.write_text(self.model_dump_json(indent=2, exclude_none=True))


class PredictionInstance(BaseModel):
    mask: str
    rank: Optional[RankName] = None
    score: Optional[float] = Field(default=None, ge=0, le=1)
    bbox: Optional[tuple[int, int, int, int]] = None


class PredictionFile(BaseModel):
    """Instance-level ranking output of one model on one image."""

    image_id: str
    instances: list[PredictionInstance] = Field(default_factory=list)


class ErrorNote(BaseModel):
    """One isolated failure: which operation, on which input, and why."""

    model_config = ConfigDict(frozen=True)

    image_id: Optional[str] = None
    method: Optional[str] = None
    metric: Optional[str] = None
    operation: str
    path: Optional[str] = None
    kind: str
    message: str

    @classmethod
    def from_exception(cls, exc: Exception, operation: str, **context: Any) -> "ErrorNote":
        fallback_path = context.pop("path", None)
        return cls(
            operation=operation,
            path=getattr(exc, "path", None) or fallback_path,
            kind=getattr(exc, "kind", type(exc).__name__),
            message=str(exc),
            **context,
        )

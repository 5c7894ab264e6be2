"""PNG/JPEG I/O for maps, masks, rank maps and RGB images."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image, UnidentifiedImageError

from camobench.core.maps import BinaryMask, Dims, MapKind, RankMap, ScalarMap, check_dims
from camobench.errors import FileMissing, UnsupportedPixelFormat, UnwritablePath
from camobench.models import RankLabel

logger = logging.getLogger(__name__)

_SIXTEEN_BIT_MODES = {"I;16", "I;16B", "I;16L", "I;16N"}


@dataclass(frozen=True, eq=False)
class RgbImage:
    """8-bit RGB pixels, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        pixels = np.array(self.pixels, dtype=np.uint8, copy=True)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ValueError(f"RGB image must have shape (h, w, 3), got {pixels.shape}")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def dims(self) -> Dims:
        return (self.pixels.shape[1], self.pixels.shape[0])


def _open(path: str | Path) -> Image.Image:
    path = Path(path)
    if not path.is_file():
        raise FileMissing(f"{path} does not exist", path=str(path))
    try:
        image = Image.open(path)
        image.load()
    except (UnidentifiedImageError, OSError) as e:
        raise UnsupportedPixelFormat(f"cannot decode {path}: {e}", path=str(path)) from e
    return image


def _read_gray(path: str | Path, expected: Optional[Dims]) -> tuple[np.ndarray, float]:
    """Return raw gray levels and the bit-depth maximum."""
    image = _open(path)
    if expected is not None:
        check_dims(image.size, expected, path=str(path))
    if image.mode == "L":
        return np.asarray(image, dtype=np.float64), 255.0
    if image.mode in _SIXTEEN_BIT_MODES:
        return np.asarray(image, dtype=np.float64), 65535.0
    if image.mode == "I":
        raw = np.asarray(image, dtype=np.float64)
        if raw.min() >= 0 and raw.max() <= 65535:
            return raw, 65535.0
    raise UnsupportedPixelFormat(
        f"{path}: mode {image.mode} is not 8/16-bit single-channel grayscale", path=str(path)
    )


def load_scalar_map(path: str | Path, expected: Optional[Dims] = None) -> ScalarMap:
    """Load a grayscale map scaled to [0, 1] by the bit-depth maximum."""
    raw, peak = _read_gray(path, expected)
    return ScalarMap(raw / peak, MapKind.UNIT)


def load_mask(path: str | Path, expected: Optional[Dims] = None) -> BinaryMask:
    """Threshold at the bit-depth midpoint: 128 -> 1, 127 -> 0 for 8-bit."""
    raw, peak = _read_gray(path, expected)
    return BinaryMask(raw > peak / 2.0)


def load_rank_map(path: str | Path, expected: Optional[Dims] = None) -> RankMap:
    raw, peak = _read_gray(path, expected)
    if peak != 255.0:
        raise UnsupportedPixelFormat(f"{path}: rank maps are 8-bit", path=str(path))
    gray_to_code = {label.gray: int(label) for label in RankLabel}
    codes = np.zeros(raw.shape, dtype=np.uint8)
    for gray, code in gray_to_code.items():
        codes[raw == gray] = code
    if np.any(codes == 0):
        raise UnsupportedPixelFormat(f"{path}: gray value outside the rank code set", path=str(path))
    return RankMap(codes)


def load_rgb_image(path: str | Path, expected: Optional[Dims] = None) -> RgbImage:
    image = _open(path)
    if expected is not None:
        check_dims(image.size, expected, path=str(path))
    return RgbImage(np.asarray(image.convert("RGB")))


def _write(image: Image.Image, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        image.save(path, format="PNG")
    except OSError as e:
        raise UnwritablePath(f"cannot write {path}: {e}", path=str(path)) from e
    return path


def save_scalar_map(m: ScalarMap, path: str | Path, bit_depth: int = 8) -> Path:
    """Save a unit-range map as 8- or 16-bit grayscale PNG."""
    values = np.clip(m.values, 0.0, 1.0)
    if bit_depth == 8:
        return _write(Image.fromarray(np.rint(values * 255).astype(np.uint8)), path)
    if bit_depth == 16:
        return _write(Image.fromarray(np.rint(values * 65535).astype(np.uint16)), path)
    raise ValueError("bit_depth must be 8 or 16")


def save_mask(mask: BinaryMask, path: str | Path) -> Path:
    return _write(Image.fromarray(mask.bits.astype(np.uint8) * 255), path)


def save_rank_map(rank_map: RankMap, path: str | Path) -> Path:
    gray = np.zeros(rank_map.labels.shape, dtype=np.uint8)
    for label in RankLabel:
        gray[rank_map.labels == label] = label.gray
    return _write(Image.fromarray(gray), path)

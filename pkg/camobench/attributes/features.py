"""Color (Lab) and texture (LBP) histograms and the chi-square distance."""

import numpy as np
from skimage.color import rgb2gray, rgb2lab
from skimage.feature import local_binary_pattern

from camobench.core.imageio import RgbImage
from camobench.errors import LengthMismatch
from camobench.models import ChiSquareMode

CHI_SQUARE_EPS = 1e-10

# (low, high) per Lab channel for D65 sRGB input
LAB_RANGES: tuple[tuple[float, float], ...] = ((0.0, 100.0), (-128.0, 127.0), (-128.0, 127.0))


def to_lab(image: RgbImage) -> np.ndarray:
    return rgb2lab(image.pixels)


def lab_histogram(lab_pixels: np.ndarray, bins: int) -> np.ndarray:
    """(3, bins) histogram of (n, 3) Lab pixels; each channel sums to 1."""
    hist = np.zeros((3, bins), dtype=np.float64)
    for channel, (lo, hi) in enumerate(LAB_RANGES):
        values = np.clip(lab_pixels[:, channel], lo, hi)
        counts, _ = np.histogram(values, bins=bins, range=(lo, hi))
        total = counts.sum()
        if total:
            hist[channel] = counts / total
    return hist


def lbp_bins(neighbors: int) -> int:
    """Bin count of the rotation-variant uniform LBP: P(P-1) + 3 (59 for P=8)."""
    return neighbors * (neighbors - 1) + 3


def lbp_codes(image: RgbImage, radius: int = 1, neighbors: int = 8) -> np.ndarray:
    """Uniform LBP codes on luminance, with edge-replicated borders."""
    gray = np.rint(rgb2gray(image.pixels) * 255).astype(np.uint8)
    padded = np.pad(gray, radius, mode="edge")
    codes = local_binary_pattern(padded, neighbors, radius, method="nri_uniform")
    return codes[radius:-radius, radius:-radius].astype(np.int64)


def texture_histogram(codes: np.ndarray, neighbors: int = 8) -> np.ndarray:
    n_bins = lbp_bins(neighbors)
    counts = np.bincount(codes.ravel(), minlength=n_bins)[:n_bins].astype(np.float64)
    total = counts.sum()
    return counts / total if total else counts


def chi_square(h: np.ndarray, g: np.ndarray) -> float:
    """0.5 * sum((h - g)^2 / (h + g + eps)); at most 1 for L1-normalized inputs."""
    h = np.asarray(h, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if h.shape != g.shape:
        raise LengthMismatch(f"histograms of shape {h.shape} and {g.shape}")
    return float(0.5 * np.sum((h - g) ** 2 / (h + g + CHI_SQUARE_EPS)))


def color_chi_square(h: np.ndarray, g: np.ndarray) -> float:
    """Mean of the per-channel distances of two (3, bins) color histograms."""
    if h.shape != g.shape:
        raise LengthMismatch(f"histograms of shape {h.shape} and {g.shape}")
    return float(np.mean([chi_square(h[c], g[c]) for c in range(h.shape[0])]))


def combined_distance(
    color_a: np.ndarray,
    texture_a: np.ndarray,
    color_b: np.ndarray,
    texture_b: np.ndarray,
    mode: ChiSquareMode,
) -> float:
    if mode == ChiSquareMode.COLOR:
        return color_chi_square(color_a, color_b)
    if mode == ChiSquareMode.TEXTURE:
        return chi_square(texture_a, texture_b)
    if mode == ChiSquareMode.CONCAT:
        a = np.concatenate([color_a.ravel() / color_a.shape[0], texture_a]) / 2.0
        b = np.concatenate([color_b.ravel() / color_b.shape[0], texture_b]) / 2.0
        return chi_square(a, b)
    return 0.5 * (color_chi_square(color_a, color_b) + chi_square(texture_a, texture_b))

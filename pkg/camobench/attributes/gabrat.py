"""Disruptive coloration: Gabor energy across versus along the object outline."""

import logging
from functools import lru_cache

import numpy as np
from scipy.ndimage import binary_erosion, gaussian_filter
from skimage.color import rgb2gray
from skimage.filters import gabor_kernel

from camobench.core.imageio import RgbImage
from camobench.core.maps import BinaryMask, check_dims
from camobench.errors import DegenerateBoundary
from camobench.models import AttributeConfig

logger = logging.getLogger(__name__)

_RATIO_EPS = 1e-12


def outline_pixels(mask: BinaryMask) -> tuple[np.ndarray, np.ndarray]:
    """(ys, xs) of mask pixels with at least one 4-neighbor outside the mask."""
    edge = mask.bits & ~binary_erosion(mask.bits, border_value=0)
    return np.nonzero(edge)


def outline_normals(mask: BinaryMask, ys: np.ndarray, xs: np.ndarray, sigma: float) -> np.ndarray:
    """Normal angle of the smoothed mask boundary at each outline pixel (y down)."""
    smoothed = gaussian_filter(mask.bits.astype(np.float64), sigma=sigma)
    gy, gx = np.gradient(smoothed)
    return np.arctan2(gy[ys, xs], gx[ys, xs])


@lru_cache(maxsize=1024)
def _kernel(frequency: float, theta: float, sigma: float, aspect: float, phase: float) -> np.ndarray:
    return gabor_kernel(
        frequency, theta=theta, sigma_x=sigma, sigma_y=sigma / aspect, offset=phase
    )


def gabor_energy(
    padded: np.ndarray, pad: int, y: int, x: int, theta: float, config: AttributeConfig
) -> float:
    """Magnitude of the complex Gabor response centered on (y, x)."""
    kernel = _kernel(
        1.0 / config.gabor_wavelength,
        float(theta),
        config.gabor_sigma,
        config.gabor_aspect,
        config.gabor_phase,
    )
    ky, kx = kernel.shape[0] // 2, kernel.shape[1] // 2
    patch = padded[pad + y - ky : pad + y + ky + 1, pad + x - kx : pad + x + kx + 1]
    return float(np.abs(np.sum(patch * kernel)))


def dc_gabrat(
    image: RgbImage, mask: BinaryMask, config: AttributeConfig | None = None
) -> tuple[bool, float]:
    """Mean over outline pixels of E_perp / (E_par + E_perp).

    E_par is the energy of the filter whose stripes run along the outline, E_perp
    that of the filter rotated by 90 degrees. High scores mean edges cross the
    outline rather than follow it.
    """
    config = config or AttributeConfig()
    check_dims(mask.dims, image.dims)
    ys, xs = outline_pixels(mask)
    if ys.size < config.min_boundary_length:
        raise DegenerateBoundary(
            f"outline has {ys.size} pixels, need {config.min_boundary_length}"
        )
    normals = outline_normals(mask, ys, xs, config.boundary_smoothing)

    luminance = rgb2gray(image.pixels)
    # gabor_kernel spans at most 3 sigma of the wider axis
    pad = int(np.ceil(3 * max(config.gabor_sigma, config.gabor_sigma / config.gabor_aspect))) + 2
    padded = np.pad(luminance, pad, mode="reflect")

    ratios = np.empty(ys.size, dtype=np.float64)
    for i, (y, x, normal) in enumerate(zip(ys, xs, normals)):
        e_par = gabor_energy(padded, pad, int(y), int(x), normal, config)
        e_perp = gabor_energy(padded, pad, int(y), int(x), normal + np.pi / 2, config)
        ratios[i] = e_perp / (e_par + e_perp + _RATIO_EPS)
    score = float(ratios.mean())
    return score > config.dc_threshold, score

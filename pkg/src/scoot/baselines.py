"""Pixel-level full-reference baselines: single-scale SSIM and GMSD."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imageio import GrayImage


@dataclass(frozen=True)
class BaselineParams:
    window_size: int = 11
    window_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0
    gmsd_downsample: int = 2
    gmsd_c: float = 170.0

    def __post_init__(self):
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ValueError("SSIM window size must be a positive odd integer")
        for name in ("window_sigma", "k1", "k2", "dynamic_range", "gmsd_downsample", "gmsd_c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def as_dict(self) -> dict:
        return dict(self.__dict__)


DEFAULT_PARAMS = BaselineParams()


def _check_pair(x: GrayImage, y: GrayImage) -> None:
    if x.shape != y.shape:
        raise ValueError(f"image sizes differ: {x.width}x{x.height} vs {y.width}x{y.height}")


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    r = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(r ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


def _valid_filter(img: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Separable correlation with ``g`` keeping only windows fully inside ``img``."""
    half = len(g) // 2
    out = ndimage.correlate1d(img, g, axis=0, mode="constant")
    out = ndimage.correlate1d(out, g, axis=1, mode="constant")
    return out[half:img.shape[0] - half, half:img.shape[1] - half]


def ssim(x: GrayImage, y: GrayImage, params: BaselineParams = DEFAULT_PARAMS) -> float:
    """Mean SSIM over Gaussian-weighted windows that fit entirely in the image."""
    _check_pair(x, y)
    n = params.window_size
    if x.width < n or x.height < n:
        raise ValueError(f"images must be at least {n}x{n} for SSIM, got {x.width}x{x.height}")
    g = gaussian_window(n, params.window_sigma)
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2

    a = x.pixels.astype(np.float64)
    b = y.pixels.astype(np.float64)
    mu_a = _valid_filter(a, g)
    mu_b = _valid_filter(b, g)
    var_a = _valid_filter(a * a, g) - mu_a * mu_a
    var_b = _valid_filter(b * b, g) - mu_b * mu_b
    cov = _valid_filter(a * b, g) - mu_a * mu_b

    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


PREWITT_X = np.array([[1.0, 0.0, -1.0]] * 3) / 3.0
PREWITT_Y = PREWITT_X.T


def _mean_pool(a: np.ndarray, f: int) -> np.ndarray:
    h, w = (a.shape[0] // f) * f, (a.shape[1] // f) * f
    return a[:h, :w].reshape(h // f, f, w // f, f).mean(axis=(1, 3))


def gradient_magnitude(a: np.ndarray) -> np.ndarray:
    gx = ndimage.correlate(a, PREWITT_X, mode="nearest")
    gy = ndimage.correlate(a, PREWITT_Y, mode="nearest")
    return np.sqrt(gx * gx + gy * gy)


def gms_map(x: GrayImage, y: GrayImage, params: BaselineParams = DEFAULT_PARAMS) -> np.ndarray:
    _check_pair(x, y)
    f = params.gmsd_downsample
    if x.width < 2 * f or x.height < 2 * f:
        raise ValueError(f"images must be at least {2 * f}x{2 * f} for GMSD, got {x.width}x{x.height}")
    ga = gradient_magnitude(_mean_pool(x.pixels.astype(np.float64), f))
    gb = gradient_magnitude(_mean_pool(y.pixels.astype(np.float64), f))
    c = params.gmsd_c
    return (2 * ga * gb + c) / (ga * ga + gb * gb + c)


def gmsd(x: GrayImage, y: GrayImage, params: BaselineParams = DEFAULT_PARAMS) -> float:
    """Population standard deviation of the gradient-magnitude similarity map (lower is better)."""
    return float(np.std(gms_map(x, y, params)))

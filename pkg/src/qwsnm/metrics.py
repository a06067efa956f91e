"""PSNR and SSIM for color images on the [0, 255] scale.

Both functions score exactly the values they are given.  Saved results are
scored through :func:`quality_report`, which first rounds both images to
8-bit the way an exported PNG would be.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .quaternion import QMatrix

__all__ = ["QualityReport", "psnr", "ssim", "to_uint8", "quality_report"]

PEAK = 255.0


@dataclass(frozen=True)
class QualityReport:
    psnr: float
    ssim: float


def _color_planes(img) -> np.ndarray:
    if isinstance(img, QMatrix):
        return img.planes[1:]
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 3:
        return arr.transpose(2, 0, 1)
    raise ValueError(f"expected a QMatrix or (m, n, 3) array, got shape {arr.shape}")


def psnr(ref, test) -> float:
    """``10 log10(255^2 / MSE)`` over all color samples; ``inf`` when equal."""
    a, b = _color_planes(ref), _color_planes(test)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return float("inf")
    return float(10.0 * np.log10(PEAK ** 2 / mse))


def _gaussian_window(size: int = 11, std: float = 1.5) -> np.ndarray:
    ax = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(ax ** 2) / (2 * std ** 2))
    win = np.outer(g, g)
    return win / win.sum()


def _ssim_plane(x: np.ndarray, y: np.ndarray, win: np.ndarray) -> float:
    c1 = (0.01 * PEAK) ** 2
    c2 = (0.03 * PEAK) ** 2

    def filt(a):
        return convolve2d(a, win, mode="valid")

    mu_x, mu_y = filt(x), filt(y)
    sxx = filt(x * x) - mu_x ** 2
    syy = filt(y * y) - mu_y ** 2
    sxy = filt(x * y) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
    den = (mu_x ** 2 + mu_y ** 2 + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def ssim(ref, test) -> float:
    """Mean over R, G, B of single-scale SSIM (11x11 Gaussian window, std 1.5)."""
    a, b = _color_planes(ref), _color_planes(test)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if min(a.shape[1:]) < 11:
        raise ValueError("SSIM needs images of at least 11x11 pixels")
    if np.array_equal(a, b):
        return 1.0
    win = _gaussian_window()
    return float(np.mean([_ssim_plane(a[c], b[c], win) for c in range(3)]))


def to_uint8(img) -> np.ndarray:
    """Clamp to [0, 255] and round, returning an ``(m, n, 3)`` uint8 array."""
    planes = _color_planes(img)
    return np.clip(np.rint(planes), 0, 255).astype(np.uint8).transpose(1, 2, 0)


def quality_report(ref, test) -> QualityReport:
    a = to_uint8(ref).astype(np.float64)
    b = to_uint8(test).astype(np.float64)
    return QualityReport(psnr(a, b), ssim(a, b))

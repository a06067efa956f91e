"""Forward degradation model and the Fourier-domain data-fidelity solve.

All blurs are real point-spread functions applied identically to the three
color planes with periodic boundaries.  For a real kernel the quaternion
Fourier solve splits exactly into independent per-plane real FFT solves,
which is what :func:`solve_x_subproblem` does.

Noise comes from numpy's PCG64 bit generator (``numpy.random.PCG64``)
seeded with the user seed, using ``Generator.standard_normal`` (ziggurat)
to draw one ``(3, m, n)`` block for the R, G, B planes in that order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quaternion import QMatrix

__all__ = [
    "Kernel",
    "DegradationModel",
    "kernel_identity",
    "kernel_uniform",
    "kernel_gaussian",
    "kernel_motion",
    "parse_kernel",
    "psf2otf",
    "blur_periodic",
    "add_noise",
    "degrade",
    "solve_x_subproblem",
    "normal_operator_apply",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class Kernel:
    """Real blur kernel; ``anchor`` is the index that maps to offset (0, 0)."""

    array: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        arr = np.array(self.array, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("kernel must be a non-empty 2D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("kernel entries must be finite")
        if abs(arr.sum() - 1.0) > 1e-12:
            raise ValueError(f"kernel must sum to 1, got {arr.sum()!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "array", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.array.shape

    @property
    def anchor(self) -> tuple[int, int]:
        return kernel_anchor(self.array.shape)

    @property
    def is_identity(self) -> bool:
        return self.array.shape == (1, 1)


def kernel_anchor(shape) -> tuple[int, int]:
    # odd sides: geometric center; even sides: floor(s/2)
    return shape[0] // 2, shape[1] // 2


@dataclass(frozen=True)
class DegradationModel:
    kernel: Kernel
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("noise level must be non-negative")


def kernel_identity() -> Kernel:
    return Kernel(np.ones((1, 1)), name="identity")


def kernel_uniform(s: int) -> Kernel:
    if s < 1 or s % 2 == 0:
        raise ValueError(f"uniform kernel side must be odd and >= 1, got {s}")
    return Kernel(np.full((s, s), 1.0 / (s * s)), name=f"uniform:{s}")


def kernel_gaussian(s: int, std: float) -> Kernel:
    """Sampled isotropic Gaussian on an ``s x s`` grid (``fspecial('gaussian')``)."""
    if s < 1 or s % 2 == 0:
        raise ValueError(f"gaussian kernel side must be odd and >= 1, got {s}")
    if std <= 0:
        raise ValueError("gaussian std must be positive")
    half = (s - 1) / 2.0
    y, x = np.mgrid[-half:half + 1, -half:half + 1]
    h = np.exp(-(x * x + y * y) / (2.0 * std * std))
    h[h < _EPS * h.max()] = 0.0
    return Kernel(h / h.sum(), name=f"gaussian:{s}:{std:g}")


def kernel_motion(length: float, angle_deg: float) -> Kernel:
    """Linear motion blur, a port of MATLAB's ``fspecial('motion', len, theta)``.

    A one-pixel-wide line of the given length is rotated by ``angle_deg``
    (counter-clockwise); each pixel is weighted by one minus its distance
    to the line, with the line ends rounded off.  The result is normalized.
    """
    if length < 1:
        raise ValueError("motion length must be >= 1")
    length = float(length)
    if length == 1.0:
        # the general construction leaves eps-sized side taps at some angles
        return Kernel(np.ones((1, 1)), name=f"motion:1:{angle_deg:g}")
    half = (length - 1.0) / 2.0
    phi = np.mod(angle_deg, 180.0) / 180.0 * np.pi
    cosphi, sinphi = np.cos(phi), np.sin(phi)
    xsign = np.sign(cosphi)
    linewdt = 1.0

    sx = np.fix(half * cosphi + linewdt * xsign - length * _EPS)
    sy = np.fix(half * sinphi + linewdt - length * _EPS)
    xs = np.arange(0.0, sx + xsign * 0.5, xsign) if xsign != 0 else np.array([0.0])
    ys = np.arange(0.0, sy + 0.5)
    x, y = np.meshgrid(xs, ys)

    dist2line = y * cosphi - x * sinphi
    rad = np.sqrt(x ** 2 + y ** 2)
    last = (rad >= half) & (np.abs(dist2line) <= linewdt)
    x2last = half - np.abs((x[last] + dist2line[last] * sinphi) / cosphi)
    dist2line[last] = np.sqrt(dist2line[last] ** 2 + x2last ** 2)
    dist2line = linewdt + _EPS - np.abs(dist2line)
    dist2line[dist2line < 0] = 0.0

    a, b = dist2line.shape
    h = np.zeros((2 * a - 1, 2 * b - 1))
    h[:a, :b] = np.rot90(dist2line, 2)
    h[a - 1:, b - 1:] = dist2line
    h = h / (h.sum() + _EPS * length * length)
    if cosphi > 0:
        h = np.flipud(h)
    # the eps-padded normalization leaves the sum a hair under 1
    h = h / h.sum()
    return Kernel(h, name=f"motion:{length:g}:{angle_deg:g}")


def parse_kernel(spec: str) -> Kernel:
    """Parse ``identity``, ``uniform:S``, ``gaussian:S:STD`` or ``motion:LEN:ANGLE``."""
    parts = spec.strip().lower().split(":")
    kind, args = parts[0], parts[1:]
    try:
        if kind == "identity" and not args:
            return kernel_identity()
        if kind == "uniform" and len(args) == 1:
            return kernel_uniform(int(args[0]))
        if kind == "gaussian" and len(args) == 2:
            return kernel_gaussian(int(args[0]), float(args[1]))
        if kind == "motion" and len(args) == 2:
            return kernel_motion(float(args[0]), float(args[1]))
    except ValueError as exc:
        raise ValueError(f"bad kernel spec {spec!r}: {exc}") from None
    raise ValueError(f"bad kernel spec {spec!r}")


def psf2otf(kernel: Kernel, shape: tuple[int, int]) -> np.ndarray:
    """2D FFT of the kernel zero-padded to ``shape`` with its anchor at (0, 0)."""
    kh, kw = kernel.shape
    m, n = shape
    if kh > m or kw > n:
        raise ValueError(f"kernel {kernel.shape} is larger than the image {shape}")
    pad = np.zeros(shape)
    pad[:kh, :kw] = kernel.array
    ar, ac = kernel.anchor
    pad = np.roll(pad, (-ar, -ac), axis=(0, 1))
    return np.fft.fft2(pad)


def _purified(planes: np.ndarray) -> QMatrix:
    planes[0] = 0.0
    return QMatrix(planes)


def blur_periodic(img: QMatrix, kernel: Kernel) -> QMatrix:
    """Circular convolution of each color plane with ``kernel``."""
    if kernel.is_identity:
        return img
    otf = psf2otf(kernel, img.shape)
    out = np.zeros_like(img.planes)
    out[1:] = np.fft.ifft2(otf * np.fft.fft2(img.planes[1:]), axes=(-2, -1)).real
    return _purified(out)


def add_noise(img: QMatrix, sigma: float, seed: int) -> QMatrix:
    """Add i.i.d. ``N(0, sigma^2)`` noise to the color planes, no clipping."""
    if sigma < 0:
        raise ValueError("noise level must be non-negative")
    if sigma == 0:
        return img
    rng = np.random.Generator(np.random.PCG64(seed))
    planes = img.planes.copy()
    planes[1:] += sigma * rng.standard_normal((3,) + img.shape)
    return QMatrix(planes)


def degrade(img: QMatrix, model: DegradationModel) -> QMatrix:
    return add_noise(blur_periodic(img, model.kernel), model.sigma, model.seed)


def solve_x_subproblem(Y: QMatrix, Z: QMatrix, eta: QMatrix, kernel: Kernel | None,
                       lam: float, beta: float, otf: np.ndarray | None = None) -> QMatrix:
    """Minimize ``lam/2 |A X - Y|^2 + beta/2 |X - Z|^2 + <eta, X - Z>``.

    Identity blur reduces to the elementwise average
    ``(lam Y + beta Z - eta) / (lam + beta)``.  A real kernel is handled
    plane by plane in the Fourier domain; ``otf`` may be passed to reuse a
    precomputed :func:`psf2otf`.
    """
    if not (Y.shape == Z.shape == eta.shape):
        raise ValueError(f"shape mismatch: Y{Y.shape}, Z{Z.shape}, eta{eta.shape}")
    if lam <= 0 or beta <= 0:
        raise ValueError("lam and beta must be positive")
    if kernel is None or kernel.is_identity:
        planes = (lam * Y.planes + beta * Z.planes - eta.planes) / (lam + beta)
        return _purified(planes)
    if otf is None:
        otf = psf2otf(kernel, Y.shape)
    num = (lam * np.conj(otf) * np.fft.fft2(Y.planes, axes=(-2, -1))
           + np.fft.fft2(beta * Z.planes - eta.planes, axes=(-2, -1)))
    den = lam * np.abs(otf) ** 2 + beta
    planes = np.fft.ifft2(num / den, axes=(-2, -1)).real
    return _purified(planes)


def normal_operator_apply(X: QMatrix, kernel: Kernel) -> QMatrix:
    """``A^T A X`` for the periodic blur, used by optimality checks."""
    if kernel.is_identity:
        return X
    otf = psf2otf(kernel, X.shape)
    planes = np.fft.ifft2(np.abs(otf) ** 2 * np.fft.fft2(X.planes, axes=(-2, -1)),
                          axes=(-2, -1)).real
    return QMatrix(planes)

"""Singular-value penalties and their proximal solvers.

The per-value problem is ``min_{d >= 0} 1/2 (d - s)^2 + w d^p``.  For
``p = 1`` it is soft thresholding; for ``0 < p < 1`` the generalized
soft-thresholding (GST) rule applies: below the threshold ``tau_p(w)`` the
minimizer is 0, above it the nonzero root of ``d - s + w p d^(p-1) = 0`` is
found by a short fixed-point iteration started at ``d = s``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Mode",
    "WeightVector",
    "ShrinkageSpec",
    "make_weights",
    "gst_threshold",
    "gst",
    "gst_array",
    "shrink_singular_values",
    "wsnorm",
]

P_ONE_TOL = 1e-9


class Mode(str, enum.Enum):
    WNNM = "wnnm"
    WSNM = "wsnm"


@dataclass(frozen=True)
class WeightVector:
    w: np.ndarray
    c: float
    eps: float


@dataclass(frozen=True)
class ShrinkageSpec:
    mode: Mode = Mode.WSNM
    p: float = 0.95
    J: int = 3

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if self.J < 1:
            raise ValueError(f"J must be >= 1, got {self.J}")


def make_weights(sigma, c: float, eps: float) -> WeightVector:
    """Reweighting rule ``w_i = c / (sigma_i + eps)``.

    ``sigma`` may carry leading batch axes; ordering is checked along the
    last one.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if c <= 0 or eps <= 0:
        raise ValueError("c and eps must be positive")
    if np.any(sigma < 0):
        raise ValueError("singular values must be non-negative")
    if sigma.shape[-1:] and np.any(np.diff(sigma, axis=-1) > 0):
        raise ValueError("singular values must be non-ascending")
    return WeightVector(c / (sigma + eps), float(c), float(eps))


def gst_threshold(w, p: float):
    """Zeroing threshold ``tau_p(w)`` of the GST rule (equals ``w`` at ``p = 1``)."""
    w = np.asarray(w, dtype=np.float64)
    if abs(p - 1.0) <= P_ONE_TOL:
        return w.copy() if w.ndim else float(w)
    base = 2.0 * w * (1.0 - p)
    return base ** (1.0 / (2.0 - p)) + w * p * base ** ((p - 1.0) / (2.0 - p))


def gst_array(sigma, w, p: float, J: int = 3) -> np.ndarray:
    """Vectorized GST over broadcast ``sigma`` and ``w``."""
    sigma = np.abs(np.asarray(sigma, dtype=np.float64))
    w = np.asarray(w, dtype=np.float64)
    sigma, w = np.broadcast_arrays(sigma, w)
    if abs(p - 1.0) <= P_ONE_TOL:
        return np.maximum(sigma - w, 0.0)
    tau = gst_threshold(w, p)
    active = sigma > tau
    out = np.zeros(sigma.shape)
    s = sigma[active]
    ww = w[active]
    d = s.copy()
    for _ in range(J):
        d = s - ww * p * d ** (p - 1.0)
    out[active] = d
    return out


def gst(sigma: float, w: float, p: float, J: int = 3) -> float:
    """Scalar GST: minimizer of ``1/2 (d - sigma)^2 + w d^p`` over ``d >= 0``."""
    if w <= 0:
        raise ValueError("w must be positive")
    if J < 1:
        raise ValueError("J must be >= 1")
    return float(gst_array(sigma, w, p, J))


def shrink_singular_values(sigma, weights: WeightVector | np.ndarray, spec: ShrinkageSpec,
                           beta: float) -> np.ndarray:
    """Shrink singular values against ``weights / beta``.

    WNNM mode is plain soft thresholding ``max(s - w/beta, 0)``; WSNM mode
    runs GST per value with the same effective weight.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    w = weights.w if isinstance(weights, WeightVector) else np.asarray(weights, dtype=np.float64)
    if sigma.shape != w.shape:
        raise ValueError(f"length mismatch: {sigma.shape} vs {w.shape}")
    if beta <= 0:
        raise ValueError("beta must be positive")
    eff = w / beta
    if spec.mode is Mode.WNNM:
        return np.maximum(sigma - eff, 0.0)
    return gst_array(sigma, eff, spec.p, spec.J)


def wsnorm(sigma, weights: WeightVector | np.ndarray, p: float) -> float:
    """Weighted Schatten p-norm raised to the p: ``sum w_i sigma_i^p``."""
    sigma = np.asarray(sigma, dtype=np.float64)
    w = weights.w if isinstance(weights, WeightVector) else np.asarray(weights, dtype=np.float64)
    if sigma.shape != w.shape:
        raise ValueError(f"length mismatch: {sigma.shape} vs {w.shape}")
    return float(np.sum(w * sigma ** p))

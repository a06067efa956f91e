"""Quaternion weighted Schatten p-norm restoration of color images.

Color images are pure quaternion matrices (R, G, B in the i, j, k parts).
Restoration runs an ADMM with penalty continuation whose low-rank step
shrinks the singular values of nonlocal patch groups with weighted
Schatten p-norm (or weighted nuclear norm) thresholding.
"""

__version__ = "0.1.0"

from .degradation import DegradationModel, Kernel, degrade, parse_kernel
from .metrics import psnr, quality_report, ssim
from .qsvd import QSvdResult, qsvd, q_rank
from .quaternion import QMatrix, Quaternion, from_rgb, to_rgb
from .shrinkage import Mode, ShrinkageSpec, gst, make_weights, shrink_singular_values
from .solver import (
    ConvergenceTrace,
    SolverConfig,
    default_deblur_config,
    default_denoise_config,
    restore,
)

__all__ = [
    "ConvergenceTrace",
    "DegradationModel",
    "Kernel",
    "Mode",
    "QMatrix",
    "QSvdResult",
    "Quaternion",
    "ShrinkageSpec",
    "SolverConfig",
    "default_deblur_config",
    "default_denoise_config",
    "degrade",
    "from_rgb",
    "gst",
    "make_weights",
    "parse_kernel",
    "psnr",
    "q_rank",
    "qsvd",
    "quality_report",
    "restore",
    "shrink_singular_values",
    "ssim",
    "to_rgb",
]

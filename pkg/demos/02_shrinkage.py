"""
Shrinking singular values: nuclear norm versus Schatten p-norm
==============================================================

Both regularizers shrink each singular value separately.  The weighted
nuclear norm subtracts a fixed amount (soft thresholding); the weighted
Schatten p-norm with p < 1 zeroes small values more aggressively and
leaves large ones closer to where they were.
"""

import numpy as np

from qwsnm.shrinkage import Mode, ShrinkageSpec, gst, gst_threshold, make_weights, shrink_singular_values

# with w fixed at 1 the zeroing threshold is w itself at p = 1 and larger below it
for p in (1.0, 0.95, 0.7, 0.5, 0.3):
    print(f"p={p:<4}  threshold={gst_threshold(1.0, p):.4f}")

# one singular value, several powers: large inputs are shrunk less when p < 1
print("\nsigma   p=1.0   p=0.7   p=0.5")
for sigma in (1.0, 2.0, 4.0, 8.0):
    row = [gst(sigma, 0.8, p, J=20) for p in (1.0, 0.7, 0.5)]
    print(f"{sigma:5.1f}  " + "  ".join(f"{v:6.3f}" for v in row))

# weights are inversely proportional to the singular values, so the
# dominant directions of a patch group are barely touched
sigma = np.array([9.0, 4.0, 1.5, 0.6, 0.2])
weights = make_weights(sigma, c=np.sqrt(2), eps=np.finfo(float).eps)
print("\nweights:", np.round(weights.w, 3))
for spec in (ShrinkageSpec(Mode.WNNM), ShrinkageSpec(Mode.WSNM, p=0.95)):
    out = shrink_singular_values(sigma, weights, spec, beta=1.0)
    print(f"{spec.mode.value}: {np.round(out, 3)}")

"""
Quaternion matrices and their singular values
=============================================

A color image is stored as a pure quaternion matrix: red, green and blue
sit in the i, j and k parts and the real part is zero.  This walk-through
shows the algebra, the quaternion SVD and why low rank is a useful prior
for groups of similar color patches.
"""

import numpy as np

from qwsnm.imageio import load_bundled
from qwsnm.patches import PatchParams, match_group
from qwsnm.qsvd import QSvdResult, qsvd
from qwsnm.quaternion import QMatrix, Quaternion, qm_frobenius

# Hamilton's rules: i*j = k but j*i = -k
i, j = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0)
print("i*j =", i * j)
print("j*i =", j * i)

# the modulus is multiplicative, even though the product is not commutative
rng = np.random.default_rng(0)
a = Quaternion(*rng.standard_normal(4))
b = Quaternion(*rng.standard_normal(4))
print("|ab| - |a||b| =", abs(a * b) - abs(a) * abs(b))

# a random quaternion matrix and its SVD: Q = U diag(S) V^H
Q = QMatrix.random(6, 4, rng)
res = qsvd(Q)
print("singular values:", np.round(res.S, 4))
print("reconstruction error:", qm_frobenius(res.reconstruct() - Q))

# U and V are unitary over the quaternions
print("|U^H U - I| =", qm_frobenius(res.U.H @ res.U - QMatrix.from_components(np.eye(4))))

# %% grouping similar patches of a real image
img = load_bundled("chelsea64")
group = match_group(img, (20, 20), PatchParams(w=6, M=60, W=30))
print("group matrix:", group.data.shape, "(pixels per patch x patches)")

# the spectrum of a group of similar patches decays fast
fac = qsvd(group.data)
S = fac.S
energy = np.cumsum(S ** 2) / np.sum(S ** 2)
print("energy captured by the first 1, 3, 6 components:", np.round(energy[[0, 2, 5]], 4))

# keeping a handful of components barely changes the group
for r in (1, 3, 6):
    kept = np.where(np.arange(len(S)) < r, S, 0.0)
    approx = QSvdResult(fac.U, kept, fac.V).reconstruct()
    rel = qm_frobenius(approx - group.data) / qm_frobenius(group.data)
    print(f"rank {r}: relative error {rel:.4f}")

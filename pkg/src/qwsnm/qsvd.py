"""Quaternion SVD through the complex adjoint embedding.

Writing ``Q = A + B j`` with complex ``A = X0 + X1 i`` and ``B = X2 + X3 i``,
the complex adjoint

    chi(Q) = [[A, B], [-conj(B), conj(A)]]

is ``2m x 2n`` and its singular values are those of ``Q``, each repeated
twice.  A quaternion column ``x1 + x2 j`` corresponds to the complex column
``[x1; -conj(x2)]``; under that map ``chi(Q)`` acts exactly like ``Q``, so
complex singular vectors translate back into quaternion ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quaternion import QMatrix, hamilton, matmul_planes

__all__ = ["QSvdResult", "QSVDError", "adjoint", "from_adjoint", "qsvd", "q_rank", "spectral_map"]

# clusters of singular values closer than this (relative to the largest) are
# treated as one degenerate subspace
CLUSTER_RTOL = 1e-9


class QSVDError(RuntimeError):
    pass


@dataclass(frozen=True)
class QSvdResult:
    U: QMatrix
    S: np.ndarray
    V: QMatrix

    def reconstruct(self) -> QMatrix:
        us = self.U.planes * self.S[None, None, :]
        return QMatrix(matmul_planes(us, self.V.H.planes))


def adjoint(planes: np.ndarray) -> np.ndarray:
    """Complex adjoint of planar quaternion data ``(4, ..., m, n) -> (..., 2m, 2n)``."""
    a = planes[0] + 1j * planes[1]
    b = planes[2] + 1j * planes[3]
    top = np.concatenate([a, b], axis=-1)
    bottom = np.concatenate([-b.conj(), a.conj()], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def from_adjoint(chi: np.ndarray) -> np.ndarray:
    """Invert :func:`adjoint`, averaging the redundant blocks."""
    m = chi.shape[-2] // 2
    n = chi.shape[-1] // 2
    a = 0.5 * (chi[..., :m, :n] + chi[..., m:, n:].conj())
    b = 0.5 * (chi[..., :m, n:] - chi[..., m:, :n].conj())
    return np.stack([a.real, a.imag, b.real, b.imag])


def _columns_to_quaternion(cols: np.ndarray) -> np.ndarray:
    """Complex ``(2L, k)`` columns -> quaternion vectors ``(k, 4, L)``."""
    half = cols.shape[0] // 2
    x1 = cols[:half].T
    x2 = -cols[half:].T.conj()
    return np.stack([x1.real, x1.imag, x2.real, x2.imag], axis=1)


def _qdot(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Quaternion inner product ``y^H x`` of vectors stored ``(4, L)``."""
    yc = y * np.array([1.0, -1.0, -1.0, -1.0])[:, None]
    return hamilton(yc, x).sum(axis=-1)


def _scale_right(x: np.ndarray, q: np.ndarray) -> np.ndarray:
    return hamilton(x, q[:, None])


def _pivoted_gram_schmidt(cand_u, basis_u, count, cand_v=None, basis_v=None):
    """Pick ``count`` orthonormal quaternion vectors from a candidate cluster.

    Candidates are first projected off ``basis_u``; each step then takes the
    candidate with the largest residual.  When ``cand_v`` is given it receives
    the same right coefficients as ``cand_u``, which keeps ``Q v = u s``
    intact.
    """
    coupled = cand_v is not None
    cu = [c.copy() for c in cand_u]
    cv = [c.copy() for c in cand_v] if coupled else None

    def project_off(y_u, y_v):
        for idx in range(len(cu)):
            coef = _qdot(y_u, cu[idx])
            cu[idx] -= _scale_right(y_u, coef)
            if coupled:
                cv[idx] -= _scale_right(y_v, coef)

    for k, y_u in enumerate(basis_u):
        project_off(y_u, basis_v[k] if coupled else None)

    out_u, out_v = [], []
    for _ in range(count):
        norms = [np.sqrt(np.sum(c ** 2)) for c in cu]
        best = int(np.argmax(norms))
        if norms[best] <= 0.0:
            raise QSVDError("degenerate cluster: candidate vectors are linearly dependent")
        y_u = cu.pop(best) / norms[best]
        y_v = cv.pop(best) / norms[best] if coupled else None
        out_u.append(y_u)
        out_v.append(y_v)
        project_off(y_u, y_v)
    return out_u, out_v


def _complex_svd(chi: np.ndarray):
    try:
        return np.linalg.svd(chi, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise QSVDError(f"complex SVD of the {chi.shape} adjoint failed to converge") from exc


def qsvd(q: QMatrix) -> QSvdResult:
    """Thin quaternion SVD ``Q = U diag(S) V^H`` with ``r = min(m, n)``.

    Singular values are non-negative and non-ascending; ``U`` and ``V`` have
    orthonormal quaternion columns.  Within a repeated singular value any
    orthonormal basis may be returned.
    """
    planes = q.planes
    if not np.all(np.isfinite(planes)):
        raise ValueError("qsvd input contains non-finite entries")
    m, n = q.shape
    r = min(m, n)
    uc, sc, vch = _complex_svd(adjoint(planes))
    s = sc[0::2].copy()

    cu = _columns_to_quaternion(uc)
    cv = _columns_to_quaternion(vch.conj().T)

    s_top = s[0] if r else 0.0
    zero_tol = 64 * np.finfo(float).eps * max(m, n) * s_top
    clus_tol = CLUSTER_RTOL * s_top

    basis_u: list[np.ndarray] = []
    basis_v: list[np.ndarray] = []
    t = 0
    while t < r:
        end = t + 1
        while end < r and s[end - 1] - s[end] <= clus_tol:
            end += 1
        if s[t] <= zero_tol:
            end = r
        count = end - t
        idx = range(2 * t, 2 * end)
        if count == 1:
            # a lone pair: the first column already spans the quaternion line
            new_u = [cu[2 * t]]
            new_v = [cv[2 * t]]
        else:
            su = [cu[i] for i in idx]
            sv = [cv[i] for i in idx]
            if s[t] > zero_tol:
                new_u, new_v = _pivoted_gram_schmidt(su, basis_u, count, sv, basis_v)
            else:
                # null directions: U and V are unrelated, orthonormalize separately
                new_u, _ = _pivoted_gram_schmidt(su, basis_u, count)
                new_v, _ = _pivoted_gram_schmidt(sv, basis_v, count)
        basis_u.extend(new_u)
        basis_v.extend(new_v)
        t = end

    u_planes = np.stack(basis_u, axis=-1) if r else np.zeros((4, m, 0))
    v_planes = np.stack(basis_v, axis=-1) if r else np.zeros((4, n, 0))
    return QSvdResult(QMatrix(u_planes), s, QMatrix(v_planes))


def q_rank(q: QMatrix, tol: float = 1e-9) -> int:
    """Number of singular values above ``tol * S[0]``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    s = qsvd(q).S
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def spectral_map(planes: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]):
    """Apply ``U diag(fn(S)) V^H`` to a batch of quaternion matrices.

    ``planes`` is ``(4, G, m, n)``; ``fn`` maps the ``(G, r)`` singular values
    to new values of the same shape.  The reconstruction runs in the complex
    adjoint domain, where each quaternion singular triplet is a pair of
    complex ones; feeding both members of the pair the same new value makes
    the result an exact adjoint again, so no quaternion vectors are formed.
    Returns ``(new_planes, S)``.
    """
    chi = adjoint(planes)
    uc, sc, vch = _complex_svd(chi)
    s = sc[..., 0::2]
    new_s = np.asarray(fn(s), dtype=np.float64)
    if new_s.shape != s.shape:
        raise ValueError(f"spectral function changed shape {s.shape} -> {new_s.shape}")
    sc_new = np.repeat(new_s, 2, axis=-1)
    rebuilt = (uc * sc_new[..., None, :]) @ vch
    return from_adjoint(rebuilt), s

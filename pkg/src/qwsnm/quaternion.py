"""Quaternion scalars and planar quaternion matrices.

A quaternion ``a0 + a1 i + a2 j + a3 k`` is held as four float64 components.
Matrices are stored planar: a ``(4, m, n)`` array whose leading axis indexes
the real, i, j and k planes.  Color images use the pure form, with R, G, B
in the i, j, k planes and a zero real plane.

Column vectors are scaled from the right (``x q``), which is the convention
under which ``Q = U diag(s) V^H`` holds for the quaternion SVD.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Quaternion",
    "QMatrix",
    "hamilton",
    "q_add",
    "q_scale",
    "q_mul",
    "q_conj",
    "q_modulus",
    "q_involution",
    "qm_mul",
    "qm_conj",
    "qm_conj_transpose",
    "qm_identity",
    "qm_frobenius",
    "qm_inner",
    "purify",
    "from_rgb",
    "to_rgb",
]


def hamilton(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise Hamilton product of component arrays.

    ``a`` and ``b`` carry the four quaternion components on axis 0 and
    broadcast over the remaining axes.
    """
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ]
    )


_CONJ_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])
_INVOLUTION_SIGNS = {
    "i": np.array([1.0, 1.0, -1.0, -1.0]),
    "j": np.array([1.0, -1.0, 1.0, -1.0]),
    "k": np.array([1.0, -1.0, -1.0, 1.0]),
}


@dataclass(frozen=True)
class Quaternion:
    a0: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        a0, a1, a2, a3 = (float(x) for x in arr)
        return cls(a0, a1, a2, a3)

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3])

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return q_add(self, other)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return q_add(self, q_scale(-1.0, other))

    def __neg__(self) -> "Quaternion":
        return q_scale(-1.0, self)

    def __mul__(self, other: Union["Quaternion", float]) -> "Quaternion":
        if isinstance(other, Quaternion):
            return q_mul(self, other)
        return q_scale(float(other), self)

    def __rmul__(self, other: float) -> "Quaternion":
        return q_scale(float(other), self)

    def __abs__(self) -> float:
        return q_modulus(self)

    def isclose(self, other: "Quaternion", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.as_array(), other.as_array(), rtol=0.0, atol=atol))


def q_add(a: Quaternion, b: Quaternion) -> Quaternion:
    return Quaternion.from_array(a.as_array() + b.as_array())


def q_scale(lam: float, a: Quaternion) -> Quaternion:
    return Quaternion.from_array(lam * a.as_array())


def q_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    return Quaternion.from_array(hamilton(a.as_array(), b.as_array()))


def q_conj(a: Quaternion) -> Quaternion:
    return Quaternion.from_array(_CONJ_SIGNS * a.as_array())


def q_modulus(a: Quaternion) -> float:
    return float(np.sqrt(np.sum(a.as_array() ** 2)))


def q_involution(a: Quaternion, axis: str) -> Quaternion:
    """Involution ``-u a u`` for the pure unit ``u`` named by ``axis``."""
    try:
        signs = _INVOLUTION_SIGNS[axis]
    except KeyError:
        raise ValueError(f"axis must be one of 'i', 'j', 'k', got {axis!r}") from None
    return Quaternion.from_array(signs * a.as_array())


class QMatrix:
    """Immutable m x n quaternion matrix with planar float64 storage."""

    __slots__ = ("_planes",)

    def __init__(self, planes):
        arr = np.array(planes, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[0] != 4:
            raise ValueError(f"expected planes of shape (4, m, n), got {arr.shape}")
        arr.flags.writeable = False
        self._planes = arr

    @classmethod
    def from_components(cls, x0=None, x1=None, x2=None, x3=None) -> "QMatrix":
        given = [x for x in (x0, x1, x2, x3) if x is not None]
        if not given:
            raise ValueError("at least one component plane is required")
        shape = np.shape(given[0])
        comps = [np.zeros(shape) if x is None else np.asarray(x, dtype=np.float64)
                 for x in (x0, x1, x2, x3)]
        if any(c.shape != shape for c in comps):
            raise ValueError("all component planes must share one shape")
        return cls(np.stack(comps))

    @classmethod
    def zeros(cls, m: int, n: int) -> "QMatrix":
        return cls(np.zeros((4, m, n)))

    @classmethod
    def random(cls, m: int, n: int, rng=None, pure: bool = False) -> "QMatrix":
        rng = np.random.default_rng(rng)
        planes = rng.standard_normal((4, m, n))
        if pure:
            planes[0] = 0.0
        return cls(planes)

    @property
    def planes(self) -> np.ndarray:
        return self._planes

    @property
    def shape(self) -> tuple[int, int]:
        return self._planes.shape[1], self._planes.shape[2]

    @property
    def m(self) -> int:
        return self._planes.shape[1]

    @property
    def n(self) -> int:
        return self._planes.shape[2]

    def __getitem__(self, idx) -> Quaternion:
        i, j = idx
        return Quaternion.from_array(self._planes[:, i, j])

    def __repr__(self) -> str:
        return f"QMatrix(shape={self.shape})"

    def __add__(self, other: "QMatrix") -> "QMatrix":
        _check_same_shape(self, other)
        return QMatrix(self._planes + other._planes)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        _check_same_shape(self, other)
        return QMatrix(self._planes - other._planes)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self._planes)

    def __mul__(self, lam: float) -> "QMatrix":
        return QMatrix(float(lam) * self._planes)

    __rmul__ = __mul__

    def __truediv__(self, lam: float) -> "QMatrix":
        return QMatrix(self._planes / float(lam))

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        return qm_mul(self, other)

    @property
    def H(self) -> "QMatrix":
        return qm_conj_transpose(self)


def _check_same_shape(a: QMatrix, b: QMatrix) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def matmul_planes(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Quaternion matrix product on planar arrays ``(4, ..., m, p) @ (4, ..., p, n)``."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.stack(
        [
            a0 @ b0 - a1 @ b1 - a2 @ b2 - a3 @ b3,
            a0 @ b1 + a1 @ b0 + a2 @ b3 - a3 @ b2,
            a0 @ b2 - a1 @ b3 + a2 @ b0 + a3 @ b1,
            a0 @ b3 + a1 @ b2 - a2 @ b1 + a3 @ b0,
        ]
    )


def qm_mul(a: QMatrix, b: QMatrix) -> QMatrix:
    if a.n != b.m:
        raise ValueError(f"inner dimensions do not match: {a.shape} @ {b.shape}")
    return QMatrix(matmul_planes(a.planes, b.planes))


def qm_conj(a: QMatrix) -> QMatrix:
    """Entrywise conjugate (no transpose)."""
    return QMatrix(_CONJ_SIGNS[:, None, None] * a.planes)


def qm_conj_transpose(a: QMatrix) -> QMatrix:
    return QMatrix(_CONJ_SIGNS[:, None, None] * a.planes.transpose(0, 2, 1))


def qm_identity(n: int) -> QMatrix:
    planes = np.zeros((4, n, n))
    planes[0] = np.eye(n)
    return QMatrix(planes)


def qm_frobenius(a: QMatrix) -> float:
    return float(np.sqrt(np.sum(a.planes ** 2)))


def qm_inner(a: QMatrix, b: QMatrix) -> float:
    """Real part of the quaternion inner product, ``sum Re(conj(a_ij) b_ij)``.

    The real part of ``conj(a) b`` is the plain dot product of the
    component vectors.
    """
    _check_same_shape(a, b)
    return float(np.sum(a.planes * b.planes))


def purify(a: QMatrix) -> QMatrix:
    """Zero the real plane."""
    planes = a.planes.copy()
    planes[0] = 0.0
    return QMatrix(planes)


def from_rgb(rgb) -> QMatrix:
    """Encode an ``(m, n, 3)`` RGB array as a pure quaternion matrix."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected an (m, n, 3) array, got {rgb.shape}")
    m, n, _ = rgb.shape
    planes = np.empty((4, m, n))
    planes[0] = 0.0
    planes[1:] = rgb.transpose(2, 0, 1)
    return QMatrix(planes)


def to_rgb(img: QMatrix) -> np.ndarray:
    """Decode the i, j, k planes into an ``(m, n, 3)`` float array."""
    return img.planes[1:].transpose(1, 2, 0).copy()

"""Nonlocal patch grouping and overlap-averaged aggregation.

Patches are addressed by their top-left pixel.  Inside a patch, pixels are
vectorized column-major, so a group is a ``(4, w*w, M)`` planar quaternion
array with one patch per column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .quaternion import QMatrix

__all__ = [
    "PatchParams",
    "PatchGroup",
    "select_keys",
    "patch_stack",
    "match_group",
    "match_all",
    "extract_groups",
    "aggregate",
    "aggregate_planes",
]


@dataclass(frozen=True)
class PatchParams:
    """Grouping geometry: patch side ``w``, group size ``M``, window ``W``."""

    w: int
    M: int
    W: int
    stride: int | None = None

    def __post_init__(self):
        if self.stride is None:
            object.__setattr__(self, "stride", max(1, self.w // 2))
        if self.w < 1 or self.M < 1 or self.stride < 1:
            raise ValueError(f"invalid patch parameters {self}")
        if self.W < self.w:
            raise ValueError(f"search window {self.W} smaller than patch {self.w}")

    def check_image(self, m: int, n: int) -> None:
        if min(m, n) < self.w:
            raise ValueError(f"image {m}x{n} is smaller than the {self.w}x{self.w} patch")


@dataclass(frozen=True)
class PatchGroup:
    key: tuple[int, int]
    members: tuple[tuple[int, int], ...]
    data: QMatrix


def _axis_keys(size: int, w: int, stride: int) -> list[int]:
    last = size - w
    keys = list(range(0, last + 1, stride))
    if keys[-1] != last:
        keys.append(last)
    return keys


def select_keys(m: int, n: int, params: PatchParams) -> list[tuple[int, int]]:
    """Key-patch grid at ``params.stride``, with the last row/column appended."""
    params.check_image(m, n)
    rows = _axis_keys(m, params.w, params.stride)
    cols = _axis_keys(n, params.w, params.stride)
    return [(r, c) for r in rows for c in cols]


def patch_stack(planes: np.ndarray, w: int) -> np.ndarray:
    """All ``w x w`` patches as ``(m-w+1, n-w+1, 4, w*w)`` column-major vectors."""
    win = sliding_window_view(planes, (w, w), axis=(1, 2))  # (4, R, C, w, w)
    r, c = win.shape[1:3]
    # swap the in-patch axes so that a C-order reshape is column-major
    return np.ascontiguousarray(win.transpose(1, 2, 0, 4, 3)).reshape(r, c, 4, w * w)


def _window_range(center: int, size: int, w: int, W: int) -> tuple[int, int]:
    half = W // 2
    lo = max(0, center - half)
    hi = min(size - w, center - half + W - 1)
    return lo, hi


def _match(stack: np.ndarray, key: tuple[int, int], m: int, n: int,
           params: PatchParams) -> list[tuple[int, int]]:
    r, c = key
    r0, r1 = _window_range(r, m, params.w, params.W)
    c0, c1 = _window_range(c, n, params.w, params.W)
    ref = stack[r, c]
    cand = stack[r0:r1 + 1, c0:c1 + 1]
    dist = np.sum((cand - ref) ** 2, axis=(2, 3)).ravel()
    ncols = c1 - c0 + 1
    key_flat = (r - r0) * ncols + (c - c0)
    dist[key_flat] = -1.0  # key always leads the group
    # stable sort keeps row-major order among ties
    order = np.argsort(dist, kind="stable")[: params.M]
    members = [(r0 + int(i) // ncols, c0 + int(i) % ncols) for i in order]
    if len(members) < params.M:
        members = [members[i % len(members)] for i in range(params.M)]
    return members


def match_group(img: QMatrix, key: tuple[int, int], params: PatchParams) -> PatchGroup:
    """Key patch plus its ``M - 1`` nearest patches in the search window.

    Candidates are all fully-inside patches whose top-left lies in the
    ``W x W`` window around the key's top-left, clipped at the image border.
    Ranking is by squared quaternion Frobenius distance, ties broken by
    row-major position.  Short candidate lists are padded cyclically.
    """
    m, n = img.shape
    params.check_image(m, n)
    r, c = key
    if not (0 <= r <= m - params.w and 0 <= c <= n - params.w):
        raise ValueError(f"key patch {key} does not fit in the {m}x{n} image")
    stack = patch_stack(img.planes, params.w)
    members = _match(stack, key, m, n, params)
    data = np.stack([stack[i, j] for i, j in members], axis=-1)
    return PatchGroup(key=(r, c), members=tuple(members), data=QMatrix(data))


def match_all(planes: np.ndarray, keys, params: PatchParams) -> np.ndarray:
    """Member coordinates for every key, ``(G, M, 2)`` int array."""
    _, m, n = planes.shape
    stack = patch_stack(planes, params.w)
    return np.array([_match(stack, k, m, n, params) for k in keys], dtype=np.intp)


def extract_groups(planes: np.ndarray, members: np.ndarray, w: int) -> np.ndarray:
    """Stack member patches into ``(4, G, w*w, M)``."""
    stack = patch_stack(planes, w)
    g = stack[members[..., 0], members[..., 1]]  # (G, M, 4, w*w)
    return g.transpose(2, 0, 3, 1)


def _pixel_index(members: np.ndarray, w: int, n: int) -> np.ndarray:
    """Flat pixel index of every (group, in-patch position, member), matching
    the ``(G, w*w, M)`` layout."""
    dc, dr = np.divmod(np.arange(w * w), w)  # column-major: row varies fastest
    rows = members[:, None, :, 0] + dr[None, :, None]
    cols = members[:, None, :, 1] + dc[None, :, None]
    return rows * n + cols


def aggregate_planes(groups: np.ndarray, members: np.ndarray, m: int, n: int) -> np.ndarray:
    """Average overlapping patch estimates back into a ``(4, m, n)`` image.

    ``bincount`` accumulates in input order, so the result does not depend
    on how the groups were produced.
    """
    _, G, ww, M = groups.shape
    w = int(round(np.sqrt(ww)))
    idx = _pixel_index(members, w, n).ravel()
    counts = np.bincount(idx, minlength=m * n)
    if np.any(counts == 0):
        raise ValueError("aggregation left pixels uncovered")
    out = np.empty((4, m * n))
    for p in range(4):
        out[p] = np.bincount(idx, weights=groups[p].ravel(), minlength=m * n) / counts
    return out.reshape(4, m, n)


def aggregate(groups_out, m: int, n: int) -> QMatrix:
    """Aggregate ``(members, QMatrix)`` pairs, or ``PatchGroup`` objects."""
    members, data = [], []
    for item in groups_out:
        if isinstance(item, PatchGroup):
            mem, q = item.members, item.data
        else:
            mem, q = item
        members.append(np.asarray(mem, dtype=np.intp))
        data.append(q.planes)
    if not members:
        raise ValueError("nothing to aggregate")
    shapes = {d.shape for d in data}
    if len(shapes) != 1:
        raise ValueError("all groups must share one shape")
    w = int(round(np.sqrt(data[0].shape[1])))
    mem = np.stack(members)
    if (mem < 0).any() or (mem[..., 0] > m - w).any() or (mem[..., 1] > n - w).any():
        raise ValueError("group coordinates fall outside the image")
    return QMatrix(aggregate_planes(np.stack(data, axis=1), mem, m, n))

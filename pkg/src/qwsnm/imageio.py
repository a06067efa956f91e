"""Image and config I/O: 8-bit RGB PNG, the float sidecar, ``key = value`` files.

Sidecar layout (all little-endian)::

    b"QIMG1"            5-byte magic
    uint32 m, uint32 n  image height and width
    float64 R[m*n], G[m*n], B[m*n]   row-major planes, unclipped
"""

from __future__ import annotations

import struct
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from .metrics import to_uint8
from .quaternion import QMatrix, from_rgb

__all__ = [
    "SIDECAR_MAGIC",
    "read_png",
    "write_png",
    "read_sidecar",
    "write_sidecar",
    "load_image",
    "bundled_names",
    "load_bundled",
    "read_config",
]

SIDECAR_MAGIC = b"QIMG1"
_HEADER = struct.Struct("<5sII")


def read_png(path) -> QMatrix:
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return from_rgb(arr)


def write_png(path, img: QMatrix) -> None:
    Image.fromarray(to_uint8(img), mode="RGB").save(path)


def write_sidecar(path, img: QMatrix) -> None:
    m, n = img.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SIDECAR_MAGIC, m, n))
        fh.write(np.ascontiguousarray(img.planes[1:], dtype="<f8").tobytes())


def read_sidecar(path) -> QMatrix:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: too short for a sidecar header")
    magic, m, n = _HEADER.unpack_from(raw)
    if magic != SIDECAR_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    body = raw[_HEADER.size:]
    if len(body) != 3 * m * n * 8:
        raise ValueError(f"{path}: expected {3 * m * n * 8} data bytes, got {len(body)}")
    planes = np.zeros((4, m, n))
    planes[1:] = np.frombuffer(body, dtype="<f8").reshape(3, m, n)
    return QMatrix(planes)


def load_image(path) -> QMatrix:
    """Read a PNG or a sidecar, dispatching on the file's magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(len(SIDECAR_MAGIC))
    if head == SIDECAR_MAGIC:
        return read_sidecar(path)
    return read_png(path)


def bundled_names() -> list[str]:
    files = resources.files("qwsnm") / "data"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".png"))


def load_bundled(name: str) -> QMatrix:
    """One of the small test crops shipped with the package."""
    ref = resources.files("qwsnm") / "data" / f"{name}.png"
    with resources.as_file(ref) as p:
        if not p.exists():
            raise FileNotFoundError(f"no bundled image {name!r}; have {bundled_names()}")
        return read_png(p)


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out

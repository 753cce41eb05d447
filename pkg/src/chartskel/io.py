"""Image and tensor file formats.

Tensor files (``.f32`` or any extension other than ``.json``/``.npy``) are
little-endian: ``uint32 ndim``, then ``ndim`` x ``uint32`` dimensions, then
the float32 payload in row-major order. ``.npy`` files go through numpy and
``.json`` files hold nested lists.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from PIL import Image

from .fields import DistanceField

FIELD_CLAMP_PX = 255


def read_image(path) -> NDArray[np.uint8]:
    """Load an image as (H, W, 4) if it carries alpha, else (H, W, 3)."""
    with Image.open(path) as im:
        has_alpha = im.mode in ("RGBA", "LA", "PA") or (im.mode == "P" and "transparency" in im.info)
        im = im.convert("RGBA" if has_alpha else "RGB")
        return np.asarray(im, dtype=np.uint8).copy()


def write_png(path, rgba: NDArray[np.uint8]) -> None:
    Image.fromarray(np.ascontiguousarray(rgba, dtype=np.uint8), mode="RGBA").save(path, format="PNG")


def field_to_uint16(field: DistanceField | NDArray) -> NDArray[np.uint16]:
    values = field.values if isinstance(field, DistanceField) else np.asarray(field)
    return np.rint(np.clip(values, 0, FIELD_CLAMP_PX) * 256).astype(np.uint16)


def write_field_png(path, field: DistanceField | NDArray) -> None:
    """16-bit grayscale dump: distance clamped at 255px, scaled by 256."""
    Image.fromarray(field_to_uint16(field)).save(path, format="PNG")


def read_field_png(path) -> NDArray[np.float64]:
    with Image.open(path) as im:
        return np.asarray(im, dtype=np.float64) / 256


def write_tensor(path, array) -> None:
    path = Path(path)
    array = np.asarray(array, dtype=np.float32)
    if path.suffix == ".json":
        path.write_text(json.dumps(array.astype(np.float64).tolist()))
    elif path.suffix == ".npy":
        np.save(path, array)
    else:
        header = struct.pack(f"<I{array.ndim}I", array.ndim, *array.shape)
        path.write_bytes(header + array.astype("<f4").tobytes(order="C"))


def read_tensor(path) -> NDArray[np.float32]:
    path = Path(path)
    if path.suffix == ".json":
        return np.asarray(json.loads(path.read_text()), dtype=np.float32)
    if path.suffix == ".npy":
        return np.load(path).astype(np.float32)
    raw = path.read_bytes()
    if len(raw) < 4:
        raise ValueError(f"{path}: truncated tensor header")
    (ndim,) = struct.unpack_from("<I", raw)
    dims = struct.unpack_from(f"<{ndim}I", raw, 4)
    offset = 4 + 4 * ndim
    count = int(np.prod(dims)) if ndim else 1
    if len(raw) - offset != 4 * count:
        raise ValueError(f"{path}: expected {count} float32 values after header")
    return np.frombuffer(raw, dtype="<f4", offset=offset, count=count).reshape(dims).astype(np.float32)

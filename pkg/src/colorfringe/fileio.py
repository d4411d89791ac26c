"""Raster and point-cloud file I/O.

Supported image formats are PNG (8/16-bit) and binary PPM (P6). File codes
are mapped linearly to [0, 1] on load (8-bit divides by 255, 16-bit by
65535); quantization on save is round-to-nearest after clamping, so the math
modules never see integer codes.

Unwrapped phase and depth travel in a minimal self-describing float raster:
magic ``CFR1``, little-endian uint32 width and height, then row-major
float32 data with NaN marking invalid pixels.
"""

from __future__ import annotations

import os
import struct

import cv2
import numpy as np

from .types import DepthMap, RgbImage

__all__ = [
    "UnsupportedFormatError",
    "CorruptImageError",
    "load_image",
    "save_image",
    "load_gray",
    "save_gray",
    "load_mask",
    "save_mask",
    "read_float_raster",
    "write_float_raster",
    "export_point_cloud",
]

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
PPM_MAGIC = b"P6"
RASTER_MAGIC = b"CFR1"


class UnsupportedFormatError(ValueError):
    """The file is not one of the supported raster formats."""


class CorruptImageError(ValueError):
    """The file looks like a supported format but cannot be decoded."""


def _sniff(path: str) -> bytes:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such image file: {path}")
    with open(path, "rb") as f:
        return f.read(8)


def _decode(path: str) -> np.ndarray:
    head = _sniff(path)
    if not (head.startswith(PNG_MAGIC) or head.startswith(PPM_MAGIC)):
        raise UnsupportedFormatError(
            f"unsupported image format (expected PNG or binary PPM): {path}"
        )
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise CorruptImageError(f"failed to decode image (corrupt header or data): {path}")
    return raw


def _to_unit(raw: np.ndarray, path: str) -> np.ndarray:
    if raw.dtype == np.uint8:
        return raw.astype(np.float64) / 255.0
    if raw.dtype == np.uint16:
        return raw.astype(np.float64) / 65535.0
    raise UnsupportedFormatError(f"unsupported sample type {raw.dtype} in {path}")


def load_image(path: str) -> RgbImage:
    """Load a PNG or binary PPM as an RgbImage with intensities in [0, 1].

    Grayscale files are replicated across the three channels; an alpha
    channel, if present, is dropped.
    """
    raw = _decode(path)
    data = _to_unit(raw, path)
    if data.ndim == 2:
        data = np.stack([data] * 3, axis=2)
    elif data.shape[2] == 4:
        data = data[:, :, :3][:, :, ::-1]
    else:
        data = data[:, :, ::-1]  # BGR -> RGB
    return RgbImage(data)


def save_image(image: RgbImage, path: str, bit_depth: int = 8) -> None:
    """Write an RgbImage as PNG or PPM, clamping then quantizing."""
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    scale = 255.0 if bit_depth == 8 else 65535.0
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    codes = np.rint(np.clip(image.data, 0.0, 1.0) * scale).astype(dtype)
    if not cv2.imwrite(path, codes[:, :, ::-1]):
        raise OSError(f"cannot write image: {path}")


def load_gray(path: str) -> np.ndarray:
    """Load a raster as a single [0, 1] float plane.

    Single-channel files load directly; multi-channel files reduce to the
    mean of their first three channels (the brightness convention), so an
    RGB capture can serve directly as a brightness raster.
    """
    raw = _decode(path)
    data = _to_unit(raw, path)
    if data.ndim == 3:
        data = data[:, :, :3].mean(axis=2)
    return data


def save_gray(values: np.ndarray, path: str, bit_depth: int = 16) -> None:
    """Write a [0, 1] field as a grayscale PNG; NaN stores as 0."""
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    scale = 255.0 if bit_depth == 8 else 65535.0
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    v = np.nan_to_num(np.asarray(values, dtype=np.float64), nan=0.0)
    codes = np.rint(np.clip(v, 0.0, 1.0) * scale).astype(dtype)
    if not cv2.imwrite(path, codes):
        raise OSError(f"cannot write image: {path}")


def load_mask(path: str) -> np.ndarray:
    return load_gray(path) > 0.5


def save_mask(mask: np.ndarray, path: str) -> None:
    codes = np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)
    if not cv2.imwrite(path, codes):
        raise OSError(f"cannot write image: {path}")


def write_float_raster(values: np.ndarray, path: str) -> None:
    """Write a 2-D float field in the CFR1 format (NaN = invalid)."""
    v = np.ascontiguousarray(values, dtype=np.float32)
    if v.ndim != 2:
        raise ValueError(f"float raster must be 2-D, got shape {v.shape}")
    h, w = v.shape
    with open(path, "wb") as f:
        f.write(RASTER_MAGIC)
        f.write(struct.pack("<II", w, h))
        f.write(v.tobytes(order="C"))


def read_float_raster(path: str) -> np.ndarray:
    """Read a CFR1 float raster back as float64 with NaN at invalid pixels."""
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such raster file: {path}")
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != RASTER_MAGIC:
            raise UnsupportedFormatError(f"not a CFR1 float raster: {path}")
        w, h = struct.unpack("<II", f.read(8))
        payload = f.read(4 * w * h)
    if len(payload) != 4 * w * h:
        raise CorruptImageError(f"truncated float raster: {path}")
    return np.frombuffer(payload, dtype="<f4").reshape(h, w).astype(np.float64)


def export_point_cloud(depth: DepthMap, path: str, stride: int = 1) -> None:
    """Write valid depth samples as an ASCII PLY point cloud.

    One vertex per valid pixel on the grid sampled every ``stride`` pixels;
    x and y are pixel coordinates, z is the depth value.
    """
    if stride < 1:
        raise ValueError(f"stride must be a positive integer, got {stride}")
    z = depth.depth[::stride, ::stride]
    m = depth.mask[::stride, ::stride]
    rows, cols = np.nonzero(m)
    xs = cols * stride
    ys = rows * stride
    zs = z[rows, cols]
    lines = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(xs)}",
        "property float x",
        "property float y",
        "property float z",
        "end_header",
    ]
    lines.extend(f"{x:g} {y:g} {v:.9g}" for x, y, v in zip(xs, ys, zs))
    try:
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write point cloud: {path}") from exc

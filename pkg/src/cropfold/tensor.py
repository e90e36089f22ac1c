"""Image tensors and the raw tensor file format.

Images are numpy arrays of shape (C, H, W), dtype float32, values in [0, 1].
The raw file format is a fixed little-endian layout used for bit-exact
persistence and cross-process parity checks:

    offset  size        field
    0       4           magic, the bytes "CMTX"
    4       1           format version, currently 1
    5       12          C, H, W as three uint32
    17      4*C*H*W     payload, float32 in channel-major order

Total size is therefore 17 + 4*C*H*W bytes, a pure function of the shape.
"""

from __future__ import annotations

import struct
from typing import BinaryIO

import numpy as np

from .errors import (
    DataRangeError,
    RawFormatError,
    RawIOError,
    TruncatedFileError,
    UnsupportedVersionError,
    ValidationError,
)

RAW_MAGIC = b"CMTX"
RAW_VERSION = 1
RAW_HEADER_SIZE = 17
RAW_EXTENSION = ".cmtx"

_HEADER = struct.Struct("<4sBIII")


def validate_image(arr: np.ndarray, name: str = "image") -> np.ndarray:
    """Check the (C, H, W) float32 [0, 1] invariants; returns the array unchanged.

    Raises ValidationError naming ``name`` plus the violated property; range
    violations report the flat index of the first offending value.
    """
    if not isinstance(arr, np.ndarray):
        raise ValidationError(f"{name}: expected a numpy array, got {type(arr).__name__}")
    if arr.ndim != 3:
        raise ValidationError(f"{name}: expected 3 dims (C, H, W), got shape {arr.shape}")
    if arr.dtype != np.float32:
        raise ValidationError(f"{name}: expected dtype float32, got {arr.dtype}")
    c, h, w = arr.shape
    if c < 1 or h < 1 or w < 1:
        raise ValidationError(f"{name}: all dims must be >= 1, got shape {arr.shape}")
    finite = np.isfinite(arr)
    if not finite.all():
        idx = int(np.flatnonzero(~finite.ravel())[0])
        raise ValidationError(f"{name}: non-finite value at flat index {idx}")
    if arr.min() < 0.0 or arr.max() > 1.0:
        bad = (arr < 0.0) | (arr > 1.0)
        idx = int(np.flatnonzero(bad.ravel())[0])
        raise ValidationError(
            f"{name}: value {arr.ravel()[idx]!r} at flat index {idx} outside [0, 1]"
        )
    return arr


def write_raw(tensor: np.ndarray, sink: BinaryIO) -> int:
    """Serialize a validated image to ``sink``; returns the byte count written.

    Output is byte-identical for identical inputs. I/O failures are wrapped in
    RawIOError carrying the offset already written.
    """
    validate_image(tensor, "tensor")
    c, h, w = tensor.shape
    header = _HEADER.pack(RAW_MAGIC, RAW_VERSION, c, h, w)
    payload = np.ascontiguousarray(tensor, dtype="<f4").tobytes()
    written = 0
    try:
        sink.write(header)
        written = len(header)
        sink.write(payload)
        written += len(payload)
    except OSError as exc:
        raise RawIOError(f"write failed at byte offset {written}: {exc}") from exc
    return written


def read_raw(source: BinaryIO) -> np.ndarray:
    """Decode a raw tensor byte stream, rejecting any format violation."""
    try:
        header = source.read(RAW_HEADER_SIZE)
    except OSError as exc:
        raise RawIOError(f"read failed at byte offset 0: {exc}") from exc
    if len(header) < RAW_HEADER_SIZE:
        raise TruncatedFileError(
            f"header truncated: expected {RAW_HEADER_SIZE} bytes, got {len(header)}"
        )
    magic, version, c, h, w = _HEADER.unpack(header)
    if magic != RAW_MAGIC:
        raise RawFormatError(f"bad magic {magic!r}, expected {RAW_MAGIC!r}")
    if version != RAW_VERSION:
        raise UnsupportedVersionError(f"unsupported version {version}, expected {RAW_VERSION}")
    if c < 1 or h < 1 or w < 1:
        raise RawFormatError(f"invalid dims ({c}, {h}, {w}): all must be >= 1")
    expected = 4 * c * h * w
    try:
        payload = source.read(expected)
    except OSError as exc:
        raise RawIOError(f"read failed at byte offset {RAW_HEADER_SIZE}: {exc}") from exc
    if len(payload) < expected:
        raise TruncatedFileError(
            f"payload truncated: expected {expected} bytes, got {len(payload)}"
        )
    flat = np.frombuffer(payload, dtype="<f4")
    arr = flat.reshape(c, h, w).astype(np.float32)
    finite = np.isfinite(arr)
    if not finite.all():
        idx = int(np.flatnonzero(~finite.ravel())[0])
        raise DataRangeError(f"non-finite payload value at flat index {idx}")
    if arr.min() < 0.0 or arr.max() > 1.0:
        bad = (arr < 0.0) | (arr > 1.0)
        idx = int(np.flatnonzero(bad.ravel())[0])
        raise DataRangeError(
            f"payload value {arr.ravel()[idx]!r} at flat index {idx} outside [0, 1]"
        )
    return arr


def raw_file_size(c: int, h: int, w: int) -> int:
    return RAW_HEADER_SIZE + 4 * c * h * w

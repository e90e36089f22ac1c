"""Crop extraction and resizing with nearest, bilinear, and bicubic kernels.

Coordinate convention is half-pixel centers: destination pixel d samples the
source at (d + 0.5) * (src / dst) - 0.5, with clamp-to-edge for taps falling
outside the region. Accumulation happens in float64 and is cast to float32 at
the end, which keeps constant inputs exactly constant (kernel weights sum to 1
up to ~1e-15, far below float32 resolution) and makes the identity resize
bit-exact for nearest and bilinear.

crop_and_resize is the fused form: it maps output coordinates straight into
the source window, never materializing the cropped region, and is
value-identical to resize(extract(src, rect), ...).
"""

from __future__ import annotations

import numpy as np

from .crop import CropRect
from .errors import ParameterError
from .tensor import validate_image

INTERPOLATION_MODES = ("nearest", "bilinear", "bicubic")

# Keys cubic convolution coefficient
_BICUBIC_A = -0.5


def _check_mode(mode: str) -> None:
    if mode not in INTERPOLATION_MODES:
        raise ParameterError(
            f"unknown interpolation mode {mode!r}; expected one of {INTERPOLATION_MODES}"
        )


def _source_coords(out_n: int, region_n: int, offset: int) -> np.ndarray:
    d = np.arange(out_n, dtype=np.float64)
    return offset + (d + 0.5) * (region_n / out_n) - 0.5


def _cubic_weights(t: np.ndarray) -> tuple[np.ndarray, ...]:
    # taps at distances 1+t, t, 1-t, 2-t from the sample point
    a = _BICUBIC_A

    def near(s):  # |s| <= 1
        return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0

    def far(s):  # 1 < |s| < 2
        return ((a * s - 5.0 * a) * s + 8.0 * a) * s - 4.0 * a

    return far(1.0 + t), near(t), near(1.0 - t), far(2.0 - t)


def extract(src: np.ndarray, rect: CropRect) -> np.ndarray:
    """Crop ``rect`` out of the source as a contiguous copy."""
    _, src_h, src_w = src.shape
    if not rect.fits(src_w, src_h):
        raise ParameterError(f"crop rect {rect} out of bounds for {src_w}x{src_h} source")
    return np.ascontiguousarray(src[:, rect.y : rect.y + rect.h, rect.x : rect.x + rect.w])


def crop_and_resize(
    src: np.ndarray,
    rect: CropRect,
    out_w: int,
    out_h: int,
    mode: str = "bilinear",
) -> np.ndarray:
    """Resize the ``rect`` region of ``src`` to (out_h, out_w) in one pass."""
    validate_image(src, "src")
    _check_mode(mode)
    if out_w < 1 or out_h < 1:
        raise ParameterError(f"output dims must be >= 1, got {out_w}x{out_h}")
    _, src_h, src_w = src.shape
    if not rect.fits(src_w, src_h):
        raise ParameterError(f"crop rect {rect} out of bounds for {src_w}x{src_h} source")

    data = src.astype(np.float64, copy=False)
    sx = _source_coords(out_w, rect.w, rect.x)
    sy = _source_coords(out_h, rect.h, rect.y)
    x_lo, x_hi = rect.x, rect.x + rect.w - 1
    y_lo, y_hi = rect.y, rect.y + rect.h - 1

    if mode == "nearest":
        ix = np.clip(np.floor(sx + 0.5).astype(np.int64), x_lo, x_hi)
        iy = np.clip(np.floor(sy + 0.5).astype(np.int64), y_lo, y_hi)
        out = data[:, iy[:, None], ix[None, :]]
    elif mode == "bilinear":
        x0 = np.floor(sx)
        y0 = np.floor(sy)
        tx = sx - x0
        ty = sy - y0
        ix0 = np.clip(x0.astype(np.int64), x_lo, x_hi)
        ix1 = np.clip(x0.astype(np.int64) + 1, x_lo, x_hi)
        iy0 = np.clip(y0.astype(np.int64), y_lo, y_hi)
        iy1 = np.clip(y0.astype(np.int64) + 1, y_lo, y_hi)
        tx = tx[None, None, :]
        ty = ty[None, :, None]
        top = data[:, iy0[:, None], ix0[None, :]] * (1.0 - tx) + data[:, iy0[:, None], ix1[None, :]] * tx
        bot = data[:, iy1[:, None], ix0[None, :]] * (1.0 - tx) + data[:, iy1[:, None], ix1[None, :]] * tx
        out = top * (1.0 - ty) + bot * ty
    else:  # bicubic
        x0 = np.floor(sx).astype(np.int64)
        y0 = np.floor(sy).astype(np.int64)
        tx = sx - np.floor(sx)
        ty = sy - np.floor(sy)
        wx = _cubic_weights(tx)
        wy = _cubic_weights(ty)
        ix = [np.clip(x0 + k, x_lo, x_hi) for k in (-1, 0, 1, 2)]
        iy = [np.clip(y0 + k, y_lo, y_hi) for k in (-1, 0, 1, 2)]
        out = np.zeros((src.shape[0], out_h, out_w), dtype=np.float64)
        for j in range(4):
            row_acc = np.zeros_like(out)
            for i in range(4):
                row_acc += data[:, iy[j][:, None], ix[i][None, :]] * wx[i][None, None, :]
            out += row_acc * wy[j][None, :, None]

    return np.clip(out, 0.0, 1.0).astype(np.float32)


def resize(src: np.ndarray, out_w: int, out_h: int, mode: str = "bilinear") -> np.ndarray:
    """Resize the whole image to (out_h, out_w)."""
    validate_image(src, "src")
    _, src_h, src_w = src.shape
    return crop_and_resize(src, CropRect(0, 0, src_w, src_h), out_w, out_h, mode)

"""Intermediate augmentations: channel permutation, flips, color jitter.

These run either on a mix operand right before a mixing step ("before"), once
on the final mixed image ("after"), or both. Sampling of random parameters is
separated from application so a recorded plan can replay the exact pixels
without consuming randomness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ParameterError
from .rng import RngStream

AUGMENT_KINDS = ("channel_permute", "hflip", "vflip", "color_jitter")
TIMING_VALUES = ("before", "after", "both")

DEFAULT_JITTER = (0.4, 0.4, 0.4)


@dataclass(frozen=True)
class AugmentOp:
    """One augmentation in the configured list.

    ``jitter`` holds (brightness, contrast, saturation) max relative deltas
    and is only meaningful for kind == "color_jitter".
    """

    kind: str
    jitter: tuple[float, float, float] = DEFAULT_JITTER

    def __post_init__(self):
        if self.kind not in AUGMENT_KINDS:
            raise ParameterError(f"unknown augment op {self.kind!r}; expected one of {AUGMENT_KINDS}")
        if len(self.jitter) != 3 or any(not (0.0 <= d <= 1.0) for d in self.jitter):
            raise ParameterError(f"jitter strengths must be three values in [0, 1], got {self.jitter}")


def check_timing(timing: str) -> str:
    if timing not in TIMING_VALUES:
        raise ParameterError(f"timing must be one of {TIMING_VALUES}, got {timing!r}")
    return timing


def sample_permutation(channels: int, stream: RngStream) -> tuple[int, ...]:
    """Uniform draw over all channels! permutations, identity included."""
    return tuple(stream.shuffled_indices(channels))


def apply_permutation(img: np.ndarray, perm: tuple[int, ...]) -> np.ndarray:
    """Reorder channels so output channel i is input channel perm[i]."""
    if sorted(perm) != list(range(img.shape[0])):
        raise ParameterError(f"{perm} is not a permutation of {img.shape[0]} channels")
    return np.ascontiguousarray(img[list(perm)])


def channel_permute(img: np.ndarray, stream: RngStream) -> tuple[np.ndarray, tuple[int, ...]]:
    """Randomly permute channels; returns the image and the applied permutation."""
    perm = sample_permutation(img.shape[0], stream)
    return apply_permutation(img, perm), perm


def flip(img: np.ndarray, axis: str) -> np.ndarray:
    """Mirror along "horizontal" (left-right) or "vertical" (top-bottom)."""
    if axis == "horizontal":
        return np.ascontiguousarray(img[:, :, ::-1])
    if axis == "vertical":
        return np.ascontiguousarray(img[:, ::-1, :])
    raise ParameterError(f"flip axis must be 'horizontal' or 'vertical', got {axis!r}")


def sample_jitter(
    strengths: tuple[float, float, float], stream: RngStream
) -> tuple[tuple[float, float, float], tuple[int, ...]]:
    """Draw (brightness, contrast, saturation) factors and their application order.

    Each factor is uniform in [1 - d, 1 + d]. All three factors are drawn even
    at strength 0 (where the draw degenerates to exactly 1) so the stream
    consumption does not depend on the strengths.
    """
    factors = tuple(stream.uniform_range(1.0 - d, 1.0 + d) for d in strengths)
    order = tuple(stream.shuffled_indices(3))
    return factors, order


def apply_jitter(
    img: np.ndarray, factors: tuple[float, float, float], order: tuple[int, ...]
) -> np.ndarray:
    """Apply brightness/contrast/saturation factors in the given order, clamped to [0, 1].

    brightness: scalar multiply. contrast: blend toward the image mean of the
    per-pixel channel average. saturation: blend toward the per-pixel channel
    average (3-channel images only; no-op otherwise).
    """
    out = img.astype(np.float32, copy=True)
    for which in order:
        f = np.float32(factors[which])
        if f == np.float32(1.0):
            continue  # identity factor must not introduce rounding noise
        if which == 0:  # brightness
            out = out * f
        elif which == 1:  # contrast
            mean = np.float32(out.mean(axis=0).mean())
            out = mean + f * (out - mean)
        else:  # saturation
            if out.shape[0] == 3:
                gray = out.mean(axis=0, keepdims=True).astype(np.float32)
                out = gray + f * (out - gray)
        out = np.clip(out, 0.0, 1.0)
    return np.ascontiguousarray(out, dtype=np.float32)


def color_jitter(
    img: np.ndarray, strengths: tuple[float, float, float], stream: RngStream
) -> np.ndarray:
    factors, order = sample_jitter(strengths, stream)
    return apply_jitter(img, factors, order)


def sample_op(op: AugmentOp, channels: int, stream: RngStream) -> dict[str, Any]:
    """Draw the random parameters of one op application into a plan record."""
    if op.kind == "channel_permute":
        return {"kind": op.kind, "perm": list(sample_permutation(channels, stream))}
    if op.kind == "color_jitter":
        factors, order = sample_jitter(op.jitter, stream)
        return {"kind": op.kind, "factors": list(factors), "order": list(order)}
    return {"kind": op.kind}


def apply_op_record(img: np.ndarray, record: dict[str, Any]) -> np.ndarray:
    """Replay one sampled op record on an image."""
    kind = record["kind"]
    if kind == "channel_permute":
        return apply_permutation(img, tuple(record["perm"]))
    if kind == "hflip":
        return flip(img, "horizontal")
    if kind == "vflip":
        return flip(img, "vertical")
    if kind == "color_jitter":
        return apply_jitter(img, tuple(record["factors"]), tuple(record["order"]))
    raise ParameterError(f"unknown augment record kind {kind!r}")


def apply_op_records(img: np.ndarray, records: list[dict[str, Any]]) -> np.ndarray:
    for record in records:
        img = apply_op_record(img, record)
    return img

"""Crop parameter sampling: scale partitioning and random resized crop rects.

The multi-crop scheme divides the whole crop-scale interval evenly into N
contiguous, non-overlapping sub-ranges and samples one crop per sub-range in
ascending order, so each crop covers a distinct band of area fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError
from .rng import RngStream

# width/height ratio bounds used everywhere unless configured otherwise
DEFAULT_RATIO = (3.0 / 4.0, 4.0 / 3.0)

MAX_CROP_ATTEMPTS = 10


@dataclass(frozen=True)
class ScaleRange:
    """Sub-interval of the crop area fraction, 0 < lo <= hi <= 1."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 < self.lo <= self.hi <= 1.0):
            raise ParameterError(f"scale range must satisfy 0 < lo <= hi <= 1, got {self}")

    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class RatioRange:
    """Width/height aspect ratio bounds, 0 < lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 < self.lo <= self.hi):
            raise ParameterError(f"ratio range must satisfy 0 < lo <= hi, got {self}")


@dataclass(frozen=True)
class CropRect:
    """Integer crop region; (x, y) is the top-left corner."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1 or self.x < 0 or self.y < 0:
            raise ParameterError(f"invalid crop rect {self}")

    def fits(self, src_w: int, src_h: int) -> bool:
        return self.x + self.w <= src_w and self.y + self.h <= src_h

    def area_fraction(self, src_w: int, src_h: int) -> float:
        return (self.w * self.h) / (src_w * src_h)


def partition_scale(whole: ScaleRange, n: int) -> list[ScaleRange]:
    """Divide ``whole`` into n equal contiguous sub-ranges, ascending.

    Sub-range i spans [lo + i*width/n, lo + (i+1)*width/n]; adjacent ranges
    share only their boundary point. The final hi is pinned to whole.hi so the
    union covers the whole range exactly.
    """
    if n < 1:
        raise ParameterError(f"partition_scale: n must be >= 1, got {n}")
    step = whole.width() / n
    parts = []
    for i in range(n):
        lo = whole.lo + i * step
        hi = whole.hi if i == n - 1 else whole.lo + (i + 1) * step
        parts.append(ScaleRange(lo, hi))
    return parts


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def sample_crop(
    src_w: int,
    src_h: int,
    scale: ScaleRange,
    ratio: RatioRange,
    stream: RngStream,
) -> CropRect:
    """Sample a crop rect with area fraction in ``scale`` and w/h in ``ratio``.

    Draws a uniform target area and a log-uniform aspect ratio, rounds to
    integer dims, and retries up to MAX_CROP_ATTEMPTS times when the rect does
    not fit the source. The fallback is a centered crop at the feasible scale
    closest to the requested range, so the operation always succeeds.
    """
    if src_w < 1 or src_h < 1:
        raise ParameterError(f"source dims must be >= 1, got {src_w}x{src_h}")
    src_area = src_w * src_h
    log_lo = math.log(ratio.lo)
    log_hi = math.log(ratio.hi)
    for _ in range(MAX_CROP_ATTEMPTS):
        target_area = stream.uniform_range(scale.lo, scale.hi) * src_area
        aspect = math.exp(stream.uniform_range(log_lo, log_hi))
        w = _round_half_up(math.sqrt(target_area * aspect))
        h = _round_half_up(math.sqrt(target_area / aspect))
        if 1 <= w <= src_w and 1 <= h <= src_h:
            x = stream.randint_below(src_w - w + 1)
            y = stream.randint_below(src_h - h + 1)
            return CropRect(x, y, w, h)
    # center-crop fallback: clamp the image ratio into bounds, then take the
    # largest feasible area fraction capped at scale.hi
    aspect = min(max(src_w / src_h, ratio.lo), ratio.hi)
    feasible = min(src_w / (src_h * aspect), (src_h * aspect) / src_w, 1.0)
    fraction = min(feasible, scale.hi)
    w = max(1, min(src_w, _round_half_up(math.sqrt(src_area * fraction * aspect))))
    h = max(1, min(src_h, _round_half_up(math.sqrt(src_area * fraction / aspect))))
    return CropRect((src_w - w) // 2, (src_h - h) // 2, w, h)


def sample_n_crops(
    src_w: int,
    src_h: int,
    whole: ScaleRange,
    ratio: RatioRange,
    n: int,
    stream: RngStream,
) -> list[tuple[ScaleRange, CropRect]]:
    """Partition ``whole`` into n sub-ranges and sample one crop per range.

    Crops are sampled in ascending scale order and paired with their
    sub-range. n = 1 reduces to a single random resized crop over the whole
    range.
    """
    parts = partition_scale(whole, n)
    return [(part, sample_crop(src_w, src_h, part, ratio, stream)) for part in parts]


def assign_partition(parts: list[ScaleRange], fraction: float) -> int:
    """Index of the sub-range containing ``fraction``.

    Membership is half-open [lo, hi) except for the last sub-range, which is
    closed, so shared boundary points have an unambiguous owner.
    """
    for i, part in enumerate(parts[:-1]):
        if part.lo <= fraction < part.hi:
            return i
    last = parts[-1]
    if last.lo <= fraction <= last.hi:
        return len(parts) - 1
    raise ParameterError(f"fraction {fraction} outside partitioned range")

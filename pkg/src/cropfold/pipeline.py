"""Per-sample orchestration: sample a plan, execute it, replay it.

One application is split into two halves so that statistics can run without
pixel work and recorded outputs can be regenerated bit-exactly:

  sample_plan  draws every random decision for (config, root_seed, index)
  execute_plan turns a plan plus the source image into the output tensor

The canonical draw order is (1) the view count N when it is chosen from a
set, (2) crop rects in ascending scale order, (3) the view mixing order,
(4) per-step lambda / box / augment parameters, (5) after-mixing augment
parameters. apply() is therefore a pure function of (source, config,
root_seed, sample_index), independent of worker count and scheduling.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import PipelineConfig
from .crop import CropRect, ScaleRange, partition_scale, sample_crop
from .errors import ReplayError
from .mix import ChainPlan, effective_weights, execute_chain, sample_chain_plan
from .resize import crop_and_resize
from .rng import split
from .tensor import validate_image

PLAN_SCHEMA = 1


@dataclass(frozen=True)
class MixPlan:
    """The full sampled randomness of one pipeline application."""

    sample_index: int
    source_shape: tuple[int, int, int]
    n: int
    scale_ranges: list[ScaleRange]
    crops: list[CropRect]
    chain: ChainPlan
    weights: list[float] | None  # per-view convex coefficients, blend mode only

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": PLAN_SCHEMA,
            "sample_index": self.sample_index,
            "source_shape": list(self.source_shape),
            "n": self.n,
            "scale_ranges": [[r.lo, r.hi] for r in self.scale_ranges],
            "crops": [[c.x, c.y, c.w, c.h] for c in self.crops],
            "chain": self.chain.to_dict(),
            "weights": self.weights,
        }

    @staticmethod
    def from_dict(d: dict[str, Any]) -> "MixPlan":
        if d.get("schema") != PLAN_SCHEMA:
            raise ReplayError(f"unsupported plan schema {d.get('schema')!r}")
        return MixPlan(
            sample_index=int(d["sample_index"]),
            source_shape=tuple(int(v) for v in d["source_shape"]),
            n=int(d["n"]),
            scale_ranges=[ScaleRange(float(lo), float(hi)) for lo, hi in d["scale_ranges"]],
            crops=[CropRect(*(int(v) for v in c)) for c in d["crops"]],
            chain=ChainPlan.from_dict(d["chain"]),
            weights=[float(w) for w in d["weights"]] if d.get("weights") is not None else None,
        )


@dataclass
class StageTimes:
    """Optional per-stage wall-time accumulator for benchmarking."""

    seconds: dict[str, float] = field(default_factory=dict)

    def add(self, stage: str, dt: float) -> None:
        self.seconds[stage] = self.seconds.get(stage, 0.0) + dt


def sample_plan(
    cfg: PipelineConfig,
    root_seed: int,
    sample_index: int,
    source_shape: tuple[int, int, int],
) -> MixPlan:
    """Draw the complete plan for one sample without touching pixels."""
    channels, src_h, src_w = source_shape
    stream = split(root_seed, sample_index)

    if cfg.baseline_rrc:
        n = 1
    elif len(cfg.num_crops) == 1:
        n = cfg.num_crops[0]
    else:
        n = cfg.num_crops[stream.randint_below(len(cfg.num_crops))]

    if cfg.baseline_rrc:
        ranges = [cfg.crop_scale]
    elif cfg.single_scale:
        ranges = [cfg.crop_scale] * n
    else:
        ranges = partition_scale(cfg.crop_scale, n)

    crops = [sample_crop(src_w, src_h, r, cfg.aspect_ratio, stream) for r in ranges]

    chain = sample_chain_plan(
        n,
        (channels, cfg.resolution, cfg.resolution),
        cfg.mix_mode,
        cfg.effective_alpha(n),
        cfg.intermediate_ops,
        cfg.timing,
        stream,
    )
    weights = effective_weights(chain, n) if cfg.mix_mode == "mixup" else None
    return MixPlan(
        sample_index=sample_index,
        source_shape=(channels, src_h, src_w),
        n=n,
        scale_ranges=ranges,
        crops=crops,
        chain=chain,
        weights=weights,
    )


def execute_plan(
    src: np.ndarray,
    cfg: PipelineConfig,
    plan: MixPlan,
    timings: StageTimes | None = None,
) -> np.ndarray:
    """Render a plan against its source image; consumes no randomness."""
    validate_image(src, "src")
    if tuple(src.shape) != plan.source_shape:
        raise ReplayError(
            f"plan was sampled for source shape {plan.source_shape}, got {tuple(src.shape)}"
        )
    if len(plan.crops) != plan.n or len(plan.scale_ranges) != plan.n:
        raise ReplayError(
            f"plan records {len(plan.crops)} crops over {len(plan.scale_ranges)} ranges for n={plan.n}"
        )
    _, src_h, src_w = src.shape
    for rect in plan.crops:
        if not rect.fits(src_w, src_h):
            raise ReplayError(f"recorded crop {rect} out of bounds for {src_w}x{src_h} source")

    t0 = time.perf_counter()
    views = [
        crop_and_resize(src, rect, cfg.resolution, cfg.resolution, cfg.interpolation)
        for rect in plan.crops
    ]
    t1 = time.perf_counter()
    out = execute_chain(views, plan.chain)
    t2 = time.perf_counter()
    if timings is not None:
        timings.add("resize", t1 - t0)
        timings.add("mix", t2 - t1)
    return out


def apply(
    src: np.ndarray,
    cfg: PipelineConfig,
    root_seed: int,
    sample_index: int,
    timings: StageTimes | None = None,
) -> tuple[np.ndarray, MixPlan]:
    """Run one full application; deterministic in (src, cfg, seed, index)."""
    validate_image(src, "src")
    t0 = time.perf_counter()
    plan = sample_plan(cfg, root_seed, sample_index, tuple(src.shape))
    t1 = time.perf_counter()
    if timings is not None:
        timings.add("crop", t1 - t0)
    out = execute_plan(src, cfg, plan, timings)
    return out, plan


def replay(src: np.ndarray, cfg: PipelineConfig, plan: MixPlan) -> np.ndarray:
    """Reproduce a recorded output bit-exactly from its plan."""
    return execute_plan(src, cfg, plan)

"""Pairwise blend/paste combiners and the sequential view-mixing chain.

A chain over N views picks a random order without replacement, blends the
first two, then folds each remaining view into the running intermediate, one
step per view, N-1 steps in total, so every view ends up contributing to the
final image. Each step draws a fresh mixing weight lambda ~ Beta(a, a).

Blend mode combines per pixel: Z = lambda * X + (1 - lambda) * Y. Paste mode
(cutmix) samples a box of pre-clamp size (W*sqrt(lambda), H*sqrt(lambda))
centered uniformly over the frame; the box is intersected with the frame, and
pixels inside the clamped box come from Y while everything else stays X.

By convention the running intermediate is always the lambda-weighted LEFT
operand; every step records enough to reconstruct effective weights and to
replay the chain without randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .augment import AugmentOp, apply_op_records, check_timing, sample_op
from .errors import ParameterError, ReplayError, ShapeMismatchError
from .rng import RngStream

MIX_MODES = ("mixup", "cutmix")


def check_mode(mode: str) -> str:
    if mode not in MIX_MODES:
        raise ParameterError(f"mix mode must be one of {MIX_MODES}, got {mode!r}")
    return mode


def _round_half_away(v: float) -> int:
    return int(math.floor(v + 0.5)) if v >= 0.0 else int(math.ceil(v - 0.5))


@dataclass(frozen=True)
class MixBox:
    """One sampled paste box: real center/size plus the clamped integer rect."""

    center_x: float
    center_y: float
    box_w: float
    box_h: float
    x: int
    y: int
    w: int
    h: int
    effective_fraction: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "center": [self.center_x, self.center_y],
            "size": [self.box_w, self.box_h],
            "rect": [self.x, self.y, self.w, self.h],
            "effective_fraction": self.effective_fraction,
        }

    @staticmethod
    def from_dict(d: dict[str, Any]) -> "MixBox":
        return MixBox(
            center_x=float(d["center"][0]),
            center_y=float(d["center"][1]),
            box_w=float(d["size"][0]),
            box_h=float(d["size"][1]),
            x=int(d["rect"][0]),
            y=int(d["rect"][1]),
            w=int(d["rect"][2]),
            h=int(d["rect"][3]),
            effective_fraction=float(d["effective_fraction"]),
        )


@dataclass(frozen=True)
class MixStep:
    """One chain step. ``left`` is a view id for the first step, None afterwards
    (the running intermediate); ``right`` is always a fresh view id."""

    left: int | None
    right: int
    lam: float
    mode: str
    box: MixBox | None = None
    aug_target: str | None = None  # "left" | "right" when before-ops fired
    augs: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "left": self.left,
            "right": self.right,
            "lambda": self.lam,
            "mode": self.mode,
            "box": self.box.to_dict() if self.box is not None else None,
            "aug_target": self.aug_target,
            "augs": self.augs,
        }

    @staticmethod
    def from_dict(d: dict[str, Any]) -> "MixStep":
        return MixStep(
            left=d["left"],
            right=int(d["right"]),
            lam=float(d["lambda"]),
            mode=str(d["mode"]),
            box=MixBox.from_dict(d["box"]) if d.get("box") is not None else None,
            aug_target=d.get("aug_target"),
            augs=list(d.get("augs") or []),
        )


@dataclass(frozen=True)
class ChainPlan:
    """The complete sampled randomness of one mixing chain."""

    order: list[int]
    steps: list[MixStep]
    final_augs: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "steps": [s.to_dict() for s in self.steps],
            "final_augs": self.final_augs,
        }

    @staticmethod
    def from_dict(d: dict[str, Any]) -> "ChainPlan":
        return ChainPlan(
            order=[int(i) for i in d["order"]],
            steps=[MixStep.from_dict(s) for s in d["steps"]],
            final_augs=list(d.get("final_augs") or []),
        )


def mixup(x: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    """Per-pixel convex combination lam * x + (1 - lam) * y."""
    if x.shape != y.shape:
        raise ShapeMismatchError(f"mixup operands differ in shape: {x.shape} vs {y.shape}")
    if not (0.0 <= lam <= 1.0):
        raise ParameterError(f"lambda must be in [0, 1], got {lam}")
    if lam == 1.0:
        return x.copy()
    if lam == 0.0:
        return y.copy()
    w = np.float32(lam)
    out = w * x + (np.float32(1.0) - w) * y
    return np.clip(out, 0.0, 1.0)


def sample_cutmix_box(frame_w: int, frame_h: int, lam: float, stream: RngStream) -> MixBox:
    """Sample a paste box for a frame: uniform center, size scaled by sqrt(lambda).

    The integer rect is the box's edges rounded half-away-from-zero and then
    intersected with the frame, so the effective covered fraction can fall
    below lambda when the box sticks out.
    """
    if not (0.0 <= lam <= 1.0):
        raise ParameterError(f"lambda must be in [0, 1], got {lam}")
    cx = stream.uniform_range(0.0, float(frame_w))
    cy = stream.uniform_range(0.0, float(frame_h))
    side = math.sqrt(lam)
    bw = frame_w * side
    bh = frame_h * side
    x1 = min(max(_round_half_away(cx - bw / 2.0), 0), frame_w)
    x2 = min(max(_round_half_away(cx + bw / 2.0), 0), frame_w)
    y1 = min(max(_round_half_away(cy - bh / 2.0), 0), frame_h)
    y2 = min(max(_round_half_away(cy + bh / 2.0), 0), frame_h)
    w = max(0, x2 - x1)
    h = max(0, y2 - y1)
    return MixBox(
        center_x=cx,
        center_y=cy,
        box_w=bw,
        box_h=bh,
        x=x1,
        y=y1,
        w=w,
        h=h,
        effective_fraction=(w * h) / (frame_w * frame_h),
    )


def cutmix(x: np.ndarray, y: np.ndarray, box: MixBox) -> np.ndarray:
    """Paste the box region of y over x; every pixel comes verbatim from x or y."""
    if x.shape != y.shape:
        raise ShapeMismatchError(f"cutmix operands differ in shape: {x.shape} vs {y.shape}")
    _, h, w = x.shape
    if box.x + box.w > w or box.y + box.h > h:
        raise ParameterError(f"box rect {box} out of bounds for {w}x{h} frame")
    out = x.copy()
    if box.w > 0 and box.h > 0:
        out[:, box.y : box.y + box.h, box.x : box.x + box.w] = y[
            :, box.y : box.y + box.h, box.x : box.x + box.w
        ]
    return out


def sample_chain_plan(
    n_views: int,
    view_shape: tuple[int, int, int],
    mode: str,
    alpha: float,
    intermediate: tuple[AugmentOp, ...],
    timing: str,
    stream: RngStream,
) -> ChainPlan:
    """Draw all randomness of one chain: view order, per-step lambda/box, op params.

    Draw order per step is lambda, then (cutmix) box center, then the
    before-op parameters for the smaller-weight operand. A single view yields
    an empty plan with no draws beyond nothing at all; intermediate ops only
    fire when a mixing step exists.
    """
    check_mode(mode)
    check_timing(timing)
    if n_views < 1:
        raise ParameterError("chain needs at least one view")
    channels = view_shape[0]
    frame_h, frame_w = view_shape[1], view_shape[2]
    order = stream.shuffled_indices(n_views)
    if n_views == 1:
        return ChainPlan(order=order, steps=[], final_augs=[])
    steps: list[MixStep] = []
    for k in range(1, n_views):
        lam = stream.beta(alpha)
        box = None
        if mode == "cutmix":
            box = sample_cutmix_box(frame_w, frame_h, lam, stream)
            left_weight = 1.0 - box.effective_fraction
        else:
            left_weight = lam
        aug_target = None
        augs: list[dict[str, Any]] = []
        if intermediate and timing in ("before", "both"):
            # permute/augment the operand with the smaller mixing weight
            aug_target = "right" if left_weight >= 0.5 else "left"
            augs = [sample_op(op, channels, stream) for op in intermediate]
        steps.append(
            MixStep(
                left=order[0] if k == 1 else None,
                right=order[k],
                lam=lam,
                mode=mode,
                box=box,
                aug_target=aug_target,
                augs=augs,
            )
        )
    final_augs: list[dict[str, Any]] = []
    if intermediate and timing in ("after", "both"):
        final_augs = [sample_op(op, channels, stream) for op in intermediate]
    return ChainPlan(order=order, steps=steps, final_augs=final_augs)


def execute_chain(views: list[np.ndarray], plan: ChainPlan) -> np.ndarray:
    """Replay a sampled chain over concrete views; consumes no randomness."""
    n = len(views)
    if n == 0:
        raise ParameterError("chain needs at least one view")
    if sorted(plan.order) != list(range(n)):
        raise ReplayError(f"plan order {plan.order} is not a permutation of {n} views")
    if len(plan.steps) != n - 1:
        raise ReplayError(f"plan has {len(plan.steps)} steps for {n} views, expected {n - 1}")
    shape = views[0].shape
    for v in views[1:]:
        if v.shape != shape:
            raise ShapeMismatchError(f"views differ in shape: {shape} vs {v.shape}")
    running = views[plan.order[0]]
    if not plan.steps:
        running = running.copy()
    for k, step in enumerate(plan.steps):
        expected_left = plan.order[0] if k == 0 else None
        if step.left != expected_left or step.right != plan.order[k + 1]:
            raise ReplayError(
                f"step {k} operands ({step.left}, {step.right}) disagree with order {plan.order}"
            )
        left = running
        right = views[step.right]
        if step.augs:
            if step.aug_target == "left":
                left = apply_op_records(left, step.augs)
            elif step.aug_target == "right":
                right = apply_op_records(right, step.augs)
            else:
                raise ReplayError(f"step {k} has augs but no aug_target")
        if step.mode == "cutmix":
            if step.box is None:
                raise ReplayError(f"step {k} is cutmix but has no box")
            running = cutmix(left, right, step.box)
        else:
            running = mixup(left, right, step.lam)
    if plan.final_augs:
        running = apply_op_records(running, plan.final_augs)
    return running


def mix_chain(
    views: list[np.ndarray],
    mode: str,
    alpha: float,
    intermediate: tuple[AugmentOp, ...] = (),
    timing: str = "before",
    stream: RngStream | None = None,
) -> tuple[np.ndarray, list[MixStep]]:
    """Sample and execute a chain in one call; returns the image and step trace."""
    if not views:
        raise ParameterError("chain needs at least one view")
    if stream is None:
        raise ParameterError("mix_chain requires a stream")
    plan = sample_chain_plan(
        len(views), views[0].shape, mode, alpha, tuple(intermediate), timing, stream
    )
    return execute_chain(views, plan), plan.steps


def effective_weights(plan: ChainPlan, n_views: int) -> list[float]:
    """Reconstruct each view's total convex coefficient from the step trace.

    Only meaningful for blend (mixup) chains: after every step the existing
    weights scale by that step's lambda and the fresh view enters with
    1 - lambda. Weights are indexed by view id and sum to 1.
    """
    weights = [0.0] * n_views
    weights[plan.order[0]] = 1.0
    for step in plan.steps:
        for i in range(n_views):
            weights[i] *= step.lam
        weights[step.right] = 1.0 - step.lam
    return weights

"""Scikit-learn style transformer wrapping the per-sample pipeline.

The transformer follows the estimator protocol by duck typing (``fit`` /
``transform`` / ``get_params`` / ``set_params``) so it drops into
sklearn pipelines and grid search without this package depending on
scikit-learn. Parameters mirror the config document keys plus the seed.

Example:
    >>> t = CropFoldTransform(resolution=64, seed=7).fit()
    >>> batch = t.transform(images)          # (n, C, H, W) -> (n, C, 64, 64)
"""

from __future__ import annotations

import inspect
from typing import Any, Sequence

import numpy as np

from .config import PipelineConfig, config_from_mapping
from .errors import ValidationError
from .pipeline import MixPlan, apply


def validate_batch(X: Any, name: str = "X") -> list[np.ndarray]:
    """Normalize a batch into a list of float32 (C, H, W) arrays in [0, 1].

    Accepts a 4D array or a sequence of 3D arrays (sizes may differ between
    samples). Raises ValidationError naming the offending sample and field.
    """
    if isinstance(X, np.ndarray):
        if X.ndim != 4:
            raise ValidationError(f"{name}: expected 4 dims (n, C, H, W), got shape {X.shape}")
        items: Sequence[Any] = list(X)
    elif isinstance(X, (list, tuple)):
        items = X
    else:
        raise ValidationError(f"{name}: expected an array or sequence of arrays")
    out = []
    for i, item in enumerate(items):
        arr = np.asarray(item)
        if arr.ndim != 3:
            raise ValidationError(f"{name}[{i}]: expected 3 dims (C, H, W), got shape {arr.shape}")
        arr = np.ascontiguousarray(arr, dtype=np.float32)
        if not np.isfinite(arr).all():
            raise ValidationError(f"{name}[{i}]: contains non-finite values")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            bad = int(np.flatnonzero((arr < 0.0) | (arr > 1.0)).ravel()[0])
            raise ValidationError(
                f"{name}[{i}]: value {arr.ravel()[bad]!r} at flat index {bad} outside [0, 1]"
            )
        out.append(arr)
    return out


class CropFoldTransform:
    """Multi-scale crop-and-mix augmentation as a stateless transformer.

    ``transform`` maps sample position i to pipeline sample index
    ``index_offset + i``, so two transformers with the same seed and offset
    produce identical outputs for identical inputs regardless of batching.
    """

    def __init__(
        self,
        crop_scale=(0.01, 1.0),
        aspect_ratio=(0.75, 4.0 / 3.0),
        num_crops=(2, 3, 4),
        single_scale=False,
        mix_mode="mixup",
        alpha_base=None,
        scale_alpha_by_n=None,
        resolution=224,
        interpolation="bilinear",
        intermediate=("channel_permute",),
        jitter=(0.4, 0.4, 0.4),
        timing="before",
        baseline_rrc=False,
        seed=0,
        index_offset=0,
    ):
        self.crop_scale = crop_scale
        self.aspect_ratio = aspect_ratio
        self.num_crops = num_crops
        self.single_scale = single_scale
        self.mix_mode = mix_mode
        self.alpha_base = alpha_base
        self.scale_alpha_by_n = scale_alpha_by_n
        self.resolution = resolution
        self.interpolation = interpolation
        self.intermediate = intermediate
        self.jitter = jitter
        self.timing = timing
        self.baseline_rrc = baseline_rrc
        self.seed = seed
        self.index_offset = index_offset

    def _build_config(self) -> PipelineConfig:
        mapping: dict[str, Any] = {
            "crop_scale": list(self.crop_scale),
            "aspect_ratio": list(self.aspect_ratio),
            "num_crops": list(np.atleast_1d(self.num_crops).tolist()),
            "single_scale": bool(self.single_scale),
            "mix_mode": self.mix_mode,
            "resolution": int(self.resolution),
            "interpolation": self.interpolation,
            "intermediate": list(self.intermediate),
            "jitter": list(self.jitter),
            "timing": self.timing,
            "baseline_rrc": bool(self.baseline_rrc),
        }
        if self.alpha_base is not None:
            mapping["alpha_base"] = float(self.alpha_base)
        if self.scale_alpha_by_n is not None:
            mapping["scale_alpha_by_n"] = bool(self.scale_alpha_by_n)
        return config_from_mapping(mapping)

    def fit(self, X=None, y=None):
        """Validate parameters; the transform itself learns nothing."""
        self.config_ = self._build_config()
        return self

    def _check_fitted(self) -> PipelineConfig:
        config = getattr(self, "config_", None)
        if config is None:
            raise ValidationError("transform called before fit")
        return config

    def transform(self, X) -> np.ndarray:
        """Augment each sample; returns a (n, C, resolution, resolution) array."""
        out, _ = self.transform_with_plans(X)
        return out

    def transform_with_plans(self, X) -> tuple[np.ndarray, list[MixPlan]]:
        """Like transform, but also returns each sample's recorded plan."""
        config = self._check_fitted()
        items = validate_batch(X)
        outputs = []
        plans = []
        for i, arr in enumerate(items):
            tensor, plan = apply(arr, config, int(self.seed), int(self.index_offset) + i)
            outputs.append(tensor)
            plans.append(plan)
        if not outputs:
            channels = 0
            return np.zeros((0, channels, self.resolution, self.resolution), np.float32), []
        return np.stack(outputs), plans

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)

    def get_params(self, deep: bool = True) -> dict[str, Any]:
        names = list(inspect.signature(type(self).__init__).parameters)[1:]
        return {name: getattr(self, name) for name in names}

    def set_params(self, **params):
        valid = set(self.get_params())
        for key, value in params.items():
            if key not in valid:
                raise ValidationError(f"invalid parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in sorted(self.get_params().items()))
        return f"{type(self).__name__}({args})"

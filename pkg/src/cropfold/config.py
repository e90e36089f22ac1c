"""Declarative pipeline configuration and the flat key-value config document.

The on-disk format is one ``key = value`` assignment per line; values are
quoted strings, integers, reals, ``true``/``false``, or ``[...]`` lists of
those. ``#`` starts a comment. Unknown keys are rejected.

Example::

    crop_scale = [0.01, 1.0]
    num_crops = [2, 3, 4]
    mix_mode = "mixup"
    alpha_base = 0.4
    scale_alpha_by_n = true
    resolution = 224
    interpolation = "bilinear"
    intermediate = ["channel_permute"]
    timing = "before"
    single_scale = false
    baseline_rrc = false
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .augment import DEFAULT_JITTER, AugmentOp, check_timing
from .crop import DEFAULT_RATIO, RatioRange, ScaleRange
from .errors import ConfigError, ParameterError
from .mix import check_mode
from .resize import INTERPOLATION_MODES

CONFIG_KEYS = (
    "crop_scale",
    "aspect_ratio",
    "num_crops",
    "single_scale",
    "mix_mode",
    "alpha_base",
    "scale_alpha_by_n",
    "resolution",
    "interpolation",
    "intermediate",
    "jitter",
    "timing",
    "baseline_rrc",
)


@dataclass(frozen=True)
class PipelineConfig:
    """Every pipeline knob, fully resolved and validated."""

    crop_scale: ScaleRange
    aspect_ratio: RatioRange
    num_crops: tuple[int, ...]
    single_scale: bool
    mix_mode: str
    alpha_base: float
    scale_alpha_by_n: bool
    resolution: int
    interpolation: str
    intermediate_ops: tuple[AugmentOp, ...]
    timing: str
    baseline_rrc: bool

    def effective_alpha(self, n: int) -> float:
        return self.alpha_base / n if self.scale_alpha_by_n else self.alpha_base

    def to_mapping(self) -> dict[str, Any]:
        """Canonical plain mapping, the inverse of from_mapping."""
        jitter = DEFAULT_JITTER
        for op in self.intermediate_ops:
            if op.kind == "color_jitter":
                jitter = op.jitter
        return {
            "crop_scale": [self.crop_scale.lo, self.crop_scale.hi],
            "aspect_ratio": [self.aspect_ratio.lo, self.aspect_ratio.hi],
            "num_crops": list(self.num_crops),
            "single_scale": self.single_scale,
            "mix_mode": self.mix_mode,
            "alpha_base": self.alpha_base,
            "scale_alpha_by_n": self.scale_alpha_by_n,
            "resolution": self.resolution,
            "interpolation": self.interpolation,
            "intermediate": [op.kind for op in self.intermediate_ops],
            "jitter": list(jitter),
            "timing": self.timing,
            "baseline_rrc": self.baseline_rrc,
        }

    def digest(self) -> str:
        """Stable content hash of the configuration."""
        canon = json.dumps(self.to_mapping(), sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(canon.encode("utf-8")).hexdigest()


def default_config(**overrides: Any) -> PipelineConfig:
    """The default multi-crop blend setup: N drawn from {2,3,4}, channel permute
    before each step, crop scale (0.01, 1.0), 224px bilinear output."""
    mapping: dict[str, Any] = {
        "crop_scale": [0.01, 1.0],
        "num_crops": [2, 3, 4],
        "mix_mode": "mixup",
        "resolution": 224,
        "interpolation": "bilinear",
        "intermediate": ["channel_permute"],
        "timing": "before",
    }
    mapping.update(overrides)
    return config_from_mapping(mapping)


def _pair(value: Any, key: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{key}: expected a [lo, hi] pair, got {value!r}")
    return float(value[0]), float(value[1])


def config_from_mapping(mapping: Mapping[str, Any]) -> PipelineConfig:
    """Build and validate a PipelineConfig from a plain mapping.

    Alpha defaults depend on the mix mode (0.4 scaled by N for blending, 1.0
    unscaled for pasting) and are resolved here when the keys are absent.
    """
    unknown = sorted(set(mapping) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        mix_mode = check_mode(str(mapping.get("mix_mode", "mixup")))

        scale_pair = _pair(mapping.get("crop_scale", [0.01, 1.0]), "crop_scale")
        crop_scale = ScaleRange(*scale_pair)
        ratio_pair = _pair(mapping.get("aspect_ratio", list(DEFAULT_RATIO)), "aspect_ratio")
        aspect_ratio = RatioRange(*ratio_pair)

        raw_n = mapping.get("num_crops", [2, 3, 4])
        if isinstance(raw_n, (int, float)) and not isinstance(raw_n, bool):
            raw_n = [raw_n]
        if not isinstance(raw_n, (list, tuple)) or not raw_n:
            raise ConfigError(f"num_crops: expected a count or non-empty list, got {raw_n!r}")
        num_crops = []
        for v in raw_n:
            if isinstance(v, bool) or int(v) != v or int(v) < 1:
                raise ConfigError(f"num_crops: entries must be integers >= 1, got {v!r}")
            num_crops.append(int(v))
        num_crops = tuple(sorted(set(num_crops)))

        if "alpha_base" in mapping:
            alpha_base = float(mapping["alpha_base"])
        else:
            alpha_base = 0.4 if mix_mode == "mixup" else 1.0
        if alpha_base <= 0.0:
            raise ConfigError(f"alpha_base must be > 0, got {alpha_base}")
        if "scale_alpha_by_n" in mapping:
            scale_alpha_by_n = _as_bool(mapping["scale_alpha_by_n"], "scale_alpha_by_n")
        else:
            scale_alpha_by_n = mix_mode == "mixup"

        resolution = int(mapping.get("resolution", 224))
        if resolution < 1:
            raise ConfigError(f"resolution must be >= 1, got {resolution}")

        interpolation = str(mapping.get("interpolation", "bilinear"))
        if interpolation not in INTERPOLATION_MODES:
            raise ConfigError(
                f"interpolation must be one of {INTERPOLATION_MODES}, got {interpolation!r}"
            )

        jitter_raw = mapping.get("jitter", list(DEFAULT_JITTER))
        if not isinstance(jitter_raw, (list, tuple)) or len(jitter_raw) != 3:
            raise ConfigError(f"jitter: expected three strengths, got {jitter_raw!r}")
        jitter = tuple(float(v) for v in jitter_raw)

        names = mapping.get("intermediate", [])
        if isinstance(names, str):
            names = [names]
        ops = tuple(
            AugmentOp(str(name), jitter) if str(name) == "color_jitter" else AugmentOp(str(name))
            for name in names
        )

        timing = check_timing(str(mapping.get("timing", "before")))
        single_scale = _as_bool(mapping.get("single_scale", False), "single_scale")
        baseline_rrc = _as_bool(mapping.get("baseline_rrc", False), "baseline_rrc")
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc

    return PipelineConfig(
        crop_scale=crop_scale,
        aspect_ratio=aspect_ratio,
        num_crops=num_crops,
        single_scale=single_scale,
        mix_mode=mix_mode,
        alpha_base=alpha_base,
        scale_alpha_by_n=scale_alpha_by_n,
        resolution=resolution,
        interpolation=interpolation,
        intermediate_ops=ops,
        timing=timing,
        baseline_rrc=baseline_rrc,
    )


def _as_bool(value: Any, key: str) -> bool:
    if isinstance(value, bool):
        return value
    raise ConfigError(f"{key}: expected true or false, got {value!r}")


def _parse_scalar(token: str, line_no: int) -> Any:
    token = token.strip()
    if not token:
        raise ConfigError(f"line {line_no}: empty value")
    if token.startswith('"') and token.endswith('"') and len(token) >= 2:
        return token[1:-1]
    if token == "true":
        return True
    if token == "false":
        return False
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        raise ConfigError(f"line {line_no}: cannot parse value {token!r}") from None


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse the flat key-value document into a plain mapping."""
    mapping: dict[str, Any] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key.isidentifier():
            raise ConfigError(f"line {line_no}: invalid key {key!r}")
        if key in mapping:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        if value.startswith("["):
            if not value.endswith("]"):
                raise ConfigError(f"line {line_no}: unterminated list")
            inner = value[1:-1].strip()
            mapping[key] = (
                [] if not inner else [_parse_scalar(tok, line_no) for tok in inner.split(",")]
            )
        else:
            mapping[key] = _parse_scalar(value, line_no)
    return mapping


def load_config(path: str | Path) -> PipelineConfig:
    """Read and validate a config document from disk."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_mapping(parse_config_text(text))

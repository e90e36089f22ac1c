"""cropfold: deterministic multi-scale crop-and-mix image augmentation.

Each sample is produced by cropping the source several times with distinct,
non-overlapping crop-scale bands, resizing every view to a fixed resolution,
and folding the views into one image through a sequential blend/paste chain.
All randomness is drawn from splittable per-sample streams, so outputs are
reproducible bit-for-bit across runs and worker counts, and every output
carries a plan sufficient for exact replay.
"""

from .augment import AugmentOp, channel_permute, color_jitter, flip
from .config import (
    PipelineConfig,
    config_from_mapping,
    default_config,
    load_config,
    parse_config_text,
)
from .crop import (
    CropRect,
    RatioRange,
    ScaleRange,
    partition_scale,
    sample_crop,
    sample_n_crops,
)
from .errors import (
    ConfigError,
    CropFoldError,
    DataRangeError,
    DecodeError,
    ParameterError,
    RawFormatError,
    RawIOError,
    ReplayError,
    ShapeMismatchError,
    TruncatedFileError,
    UnsupportedVersionError,
    ValidationError,
)
from .estimator import CropFoldTransform, validate_batch
from .mix import MixBox, MixStep, cutmix, mix_chain, mixup, sample_cutmix_box
from .pipeline import MixPlan, apply, replay, sample_plan
from .resize import crop_and_resize, resize
from .rng import RngStream, sample_beta, sample_uniform_range, split
from .tensor import read_raw, validate_image, write_raw

__version__ = "0.1.0"

__all__ = [
    "AugmentOp",
    "ConfigError",
    "CropFoldError",
    "CropFoldTransform",
    "CropRect",
    "DataRangeError",
    "DecodeError",
    "MixBox",
    "MixPlan",
    "MixStep",
    "ParameterError",
    "PipelineConfig",
    "RatioRange",
    "RawFormatError",
    "RawIOError",
    "ReplayError",
    "RngStream",
    "ScaleRange",
    "ShapeMismatchError",
    "TruncatedFileError",
    "UnsupportedVersionError",
    "ValidationError",
    "apply",
    "channel_permute",
    "color_jitter",
    "config_from_mapping",
    "crop_and_resize",
    "cutmix",
    "default_config",
    "flip",
    "load_config",
    "mix_chain",
    "mixup",
    "parse_config_text",
    "partition_scale",
    "read_raw",
    "replay",
    "resize",
    "sample_beta",
    "sample_crop",
    "sample_cutmix_box",
    "sample_n_crops",
    "sample_plan",
    "sample_uniform_range",
    "split",
    "validate_batch",
    "validate_image",
    "write_raw",
]

"""Dataset scanning, image decode, and output persistence with manifests.

Sources are discovered by a recursive scan sorted by byte-order path, so the
index assigned to each file is stable across runs and platforms. Outputs are
written per sample (``sample_<i>.png`` / ``sample_<i>.cmtx``) next to a JSON
manifest ``sample_<i>.json`` that records everything needed to regenerate the
raw output bit-exactly: source path, root seed, sample index, config digest,
and the full plan.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, ParameterError, RawFormatError
from .pipeline import MixPlan
from .tensor import RAW_EXTENSION, read_raw, validate_image, write_raw

DEFAULT_EXTENSIONS = (".png", ".jpg", ".jpeg", RAW_EXTENSION)
FORMATS = ("png", "raw")


def scan_dataset(root: str | Path, extensions: Iterable[str] | None = None) -> list[Path]:
    """List source files under ``root`` in deterministic lexicographic order.

    The position in this list is the file's sample index.
    """
    root = Path(root)
    if not root.is_dir():
        raise DecodeError(f"dataset root {root} is not a readable directory")
    wanted = tuple(e.lower() for e in (extensions or DEFAULT_EXTENSIONS))
    found = [p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in wanted]
    found.sort(key=lambda p: p.relative_to(root).as_posix())
    return found


def decode(path: str | Path) -> np.ndarray:
    """Decode one source file to a (C, H, W) float32 tensor in [0, 1].

    8-bit PNG/JPEG values map to v/255; grayscale yields C=1, color C=3,
    alpha is dropped. Raw tensor files decode through the binary format.
    """
    path = Path(path)
    if path.suffix.lower() == RAW_EXTENSION:
        try:
            with open(path, "rb") as fh:
                return read_raw(fh)
        except (OSError, RawFormatError) as exc:
            raise DecodeError(f"cannot decode {path}: {exc}") from exc
    try:
        with Image.open(path) as img:
            if img.mode == "L":
                pass
            elif img.mode == "LA":
                img = img.convert("L")
            else:
                img = img.convert("RGB")
            arr = np.asarray(img, dtype=np.uint8)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[None, :, :]
    else:
        arr = np.moveaxis(arr, -1, 0)
    return np.ascontiguousarray(arr.astype(np.float32) / np.float32(255.0))


def encode_png(tensor: np.ndarray, path: str | Path) -> None:
    """Write a tensor as an 8-bit PNG via v -> round(v * 255)."""
    validate_image(tensor, "tensor")
    c = tensor.shape[0]
    if c not in (1, 3):
        raise ParameterError(f"png output supports 1 or 3 channels, got {c}")
    quantized = np.floor(tensor * 255.0 + 0.5).astype(np.uint8)
    if c == 1:
        img = Image.fromarray(quantized[0], mode="L")
    else:
        img = Image.fromarray(np.moveaxis(quantized, 0, -1), mode="RGB")
    img.save(path, format="PNG")


@dataclass(frozen=True)
class SampleManifest:
    """Sidecar record that makes one output reproducible."""

    source: str
    root_seed: int
    sample_index: int
    config_digest: str
    plan: MixPlan
    outputs: list[str]

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": self.source,
            "root_seed": self.root_seed,
            "sample_index": self.sample_index,
            "config_digest": self.config_digest,
            "plan": self.plan.to_dict(),
            "outputs": self.outputs,
        }

    @staticmethod
    def from_dict(d: dict[str, Any]) -> "SampleManifest":
        return SampleManifest(
            source=str(d["source"]),
            root_seed=int(d["root_seed"]),
            sample_index=int(d["sample_index"]),
            config_digest=str(d["config_digest"]),
            plan=MixPlan.from_dict(d["plan"]),
            outputs=[str(o) for o in d["outputs"]],
        )


def manifest_path(out_dir: str | Path, sample_index: int) -> Path:
    return Path(out_dir) / f"sample_{sample_index}.json"


def raw_path(out_dir: str | Path, sample_index: int) -> Path:
    return Path(out_dir) / f"sample_{sample_index}{RAW_EXTENSION}"


def png_path(out_dir: str | Path, sample_index: int) -> Path:
    return Path(out_dir) / f"sample_{sample_index}.png"


def persist(
    out_dir: str | Path,
    sample_index: int,
    tensor: np.ndarray,
    plan: MixPlan,
    formats: Iterable[str],
    *,
    source: str,
    root_seed: int,
    config_digest: str,
) -> SampleManifest:
    """Write the requested output formats plus the manifest; returns the manifest.

    The manifest is written atomically (tmp file + rename) so a crashed run
    never leaves a half-written record behind.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    chosen = list(formats)
    bad = sorted(set(chosen) - set(FORMATS))
    if bad:
        raise ParameterError(f"unknown output formats: {', '.join(bad)}")
    if not chosen:
        raise ParameterError("at least one output format is required")
    outputs: list[str] = []
    if "png" in chosen:
        p = png_path(out_dir, sample_index)
        encode_png(tensor, p)
        outputs.append(p.name)
    if "raw" in chosen:
        p = raw_path(out_dir, sample_index)
        with open(p, "wb") as fh:
            write_raw(tensor, fh)
        outputs.append(p.name)
    manifest = SampleManifest(
        source=source,
        root_seed=root_seed,
        sample_index=sample_index,
        config_digest=config_digest,
        plan=plan,
        outputs=outputs,
    )
    target = manifest_path(out_dir, sample_index)
    tmp = target.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, target)
    return manifest


def load_manifest(path: str | Path) -> SampleManifest:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DecodeError(f"cannot read manifest {path}: {exc}") from exc
    return SampleManifest.from_dict(data)

"""Command-line interface: sample, stats, bench, replay.

Exit codes: 0 success, 1 usage/config/IO error, 2 verification mismatch.
Reports (stats, bench) are JSON on stdout; sample prints a one-line summary.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import PipelineConfig, load_config
from .crop import partition_scale
from .dataset import (
    FORMATS,
    decode,
    load_manifest,
    raw_path,
    scan_dataset,
)
from .dataset import persist as persist_sample
from .errors import CropFoldError
from .pipeline import StageTimes, apply, replay, sample_plan
from .rng import beta_variance
from .tensor import write_raw

STATS_SOURCE_SHAPE = (3, 512, 512)  # nominal source for plan-only statistics


def _add_common(p: argparse.ArgumentParser, *, input_dir: bool, output_dir: bool) -> None:
    if input_dir:
        p.add_argument("--input", required=True, help="source image directory")
    if output_dir:
        p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--config", required=True, help="pipeline config document")
    p.add_argument("--seed", type=int, default=0, help="64-bit root seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cropfold",
        description="Deterministic multi-scale crop-and-mix augmentation pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="produce augmented samples with manifests")
    _add_common(p, input_dir=True, output_dir=True)
    p.add_argument("--count", type=int, default=1, help="number of samples to produce")
    p.add_argument("--start", type=int, default=0, help="first sample index (default 0)")
    p.add_argument("--workers", type=int, default=0, help="worker threads (0 = all cores)")
    p.add_argument("--formats", default="raw", help="comma-joined subset of png,raw")

    p = sub.add_parser("stats", help="plan-only sampling statistics as JSON")
    _add_common(p, input_dir=False, output_dir=False)
    p.add_argument("--count", type=int, default=10000, help="number of plan trials")

    p = sub.add_parser("bench", help="time the baseline crop against the full pipeline")
    _add_common(p, input_dir=True, output_dir=False)
    p.add_argument("--count", type=int, default=1000, help="samples per timed run")
    p.add_argument("--workers", type=int, default=0, help="worker threads (0 = all cores)")
    p.add_argument("--mode", choices=("rrc", "cropmix"), default=None,
                   help="time only one mode instead of both")

    p = sub.add_parser("replay", help="verify stored outputs regenerate bit-exactly")
    _add_common(p, input_dir=True, output_dir=True)

    return parser


def _workers(requested: int) -> int:
    if requested and requested > 0:
        return requested
    return os.cpu_count() or 1


def cmd_sample(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    formats = tuple(f for f in args.formats.split(",") if f)
    unknown = sorted(set(formats) - set(FORMATS))
    if unknown:
        raise CropFoldError(f"unknown output formats: {', '.join(unknown)}")
    if args.count < 0:
        raise CropFoldError(f"--count must be >= 0, got {args.count}")
    sources = scan_dataset(args.input)
    if args.count > 0 and not sources:
        raise CropFoldError(f"no source images found under {args.input}")
    digest = cfg.digest()
    root = Path(args.input)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)

    def work(index: int) -> None:
        src_path = sources[index % len(sources)]
        tensor = decode(src_path)
        out, plan = apply(tensor, cfg, args.seed, index)
        persist_sample(
            out_dir,
            index,
            out,
            plan,
            formats,
            source=src_path.relative_to(root).as_posix(),
            root_seed=args.seed,
            config_digest=digest,
        )

    started = time.perf_counter()
    indices = range(args.start, args.start + args.count)
    with ThreadPoolExecutor(max_workers=_workers(args.workers)) as pool:
        for _ in pool.map(work, indices):
            pass
    elapsed = time.perf_counter() - started
    rate = args.count / elapsed if elapsed > 0 else float("inf")
    print(f"samples={args.count} elapsed={elapsed:.3f}s rate={rate:.1f}/s")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.count < 1:
        raise CropFoldError(f"--count must be >= 1, got {args.count}")
    channels, src_h, src_w = STATS_SOURCE_SHAPE

    n_hist: dict[int, int] = {}
    areas: dict[tuple[int, int], list[float]] = {}
    lambdas: dict[int, list[float]] = {}
    fractions: list[float] = []
    perm_hist: dict[str, int] = {}

    for index in range(args.count):
        plan = sample_plan(cfg, args.seed, index, STATS_SOURCE_SHAPE)
        n_hist[plan.n] = n_hist.get(plan.n, 0) + 1
        for slot, rect in enumerate(plan.crops):
            areas.setdefault((plan.n, slot), []).append(rect.area_fraction(src_w, src_h))
        for step in plan.chain.steps:
            lambdas.setdefault(plan.n, []).append(step.lam)
            if step.box is not None:
                fractions.append(step.box.effective_fraction)
            for record in step.augs:
                if record["kind"] == "channel_permute":
                    key = ",".join(str(v) for v in record["perm"])
                    perm_hist[key] = perm_hist.get(key, 0) + 1
        for record in plan.chain.final_augs:
            if record["kind"] == "channel_permute":
                key = ",".join(str(v) for v in record["perm"])
                perm_hist[key] = perm_hist.get(key, 0) + 1

    crop_area = []
    for (n, slot), values in sorted(areas.items()):
        rng = plan_ranges_for(cfg, n)[slot]
        arr = np.asarray(values)
        crop_area.append(
            {
                "n": n,
                "slot": slot,
                "scale_lo": rng[0],
                "scale_hi": rng[1],
                "count": int(arr.size),
                "min": float(arr.min()),
                "mean": float(arr.mean()),
                "max": float(arr.max()),
            }
        )
    lam_report = {}
    for n, values in sorted(lambdas.items()):
        arr = np.asarray(values)
        alpha = cfg.effective_alpha(n)
        lam_report[str(n)] = {
            "count": int(arr.size),
            "mean": float(arr.mean()),
            "variance": float(arr.var()),
            "alpha": alpha,
            "expected_mean": 0.5,
            "expected_variance": beta_variance(alpha),
        }

    report = {
        "trials": args.count,
        "seed": args.seed,
        "config_digest": cfg.digest(),
        "n_histogram": {str(k): v for k, v in sorted(n_hist.items())},
        "crop_area": crop_area,
        "lambda": lam_report,
        "cutmix_effective_fraction_mean": (
            float(np.mean(fractions)) if fractions else None
        ),
        "permutation_histogram": dict(sorted(perm_hist.items())),
    }
    json.dump(report, sys.stdout, indent=2)
    print()
    return 0


def plan_ranges_for(cfg: PipelineConfig, n: int) -> list[tuple[float, float]]:
    """The scale sub-range assigned to each crop slot under this config."""
    if cfg.baseline_rrc:
        return [(cfg.crop_scale.lo, cfg.crop_scale.hi)]
    if cfg.single_scale:
        return [(cfg.crop_scale.lo, cfg.crop_scale.hi)] * n
    return [(r.lo, r.hi) for r in partition_scale(cfg.crop_scale, n)]


def _bench_once(
    cfg: PipelineConfig, sources: list[Path], seed: int, count: int, workers: int
) -> dict:
    latencies = [0.0] * count
    stage_totals = StageTimes()

    def work(index: int) -> None:
        t0 = time.perf_counter()
        timings = StageTimes()
        tensor = decode(sources[index % len(sources)])
        t1 = time.perf_counter()
        timings.add("decode", t1 - t0)
        out, _ = apply(tensor, cfg, seed, index, timings)
        t2 = time.perf_counter()
        write_raw(out, io.BytesIO())
        timings.add("encode", time.perf_counter() - t2)
        latencies[index] = time.perf_counter() - t0
        for stage, dt in timings.seconds.items():
            stage_totals.add(stage, dt)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for _ in pool.map(work, range(count)):
            pass

    arr = np.asarray(latencies)
    stage_sum = sum(stage_totals.seconds.values())
    shares = {
        stage: stage_totals.seconds.get(stage, 0.0) / stage_sum if stage_sum else 0.0
        for stage in ("decode", "crop", "resize", "mix", "encode")
    }
    return {
        "samples": count,
        "mean_s": float(arr.mean()),
        "p50_s": float(np.percentile(arr, 50)),
        "p99_s": float(np.percentile(arr, 99)),
        "stage_shares": shares,
    }


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.count < 1:
        raise CropFoldError(f"--count must be >= 1, got {args.count}")
    sources = scan_dataset(args.input)
    if not sources:
        raise CropFoldError(f"no source images found under {args.input}")
    workers = _workers(args.workers)
    baseline_cfg = dataclasses.replace(cfg, baseline_rrc=True)

    report: dict = {"workers": workers, "resolution": cfg.resolution, "seed": args.seed}
    if args.mode in (None, "rrc"):
        report["rrc"] = _bench_once(baseline_cfg, sources, args.seed, args.count, workers)
    if args.mode in (None, "cropmix"):
        report["cropmix"] = _bench_once(cfg, sources, args.seed, args.count, workers)
    if "rrc" in report and "cropmix" in report:
        report["overhead_ratio"] = report["cropmix"]["mean_s"] / report["rrc"]["mean_s"]
    json.dump(report, sys.stdout, indent=2)
    print()
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    digest = cfg.digest()
    out_dir = Path(args.output)
    root = Path(args.input)
    manifest_files = sorted(
        (p for p in out_dir.glob("sample_*.json")),
        key=lambda p: int(p.stem.split("_", 1)[1]),
    )
    if not manifest_files:
        raise CropFoldError(f"no manifests found under {out_dir}")
    mismatches: list[int] = []
    for mf in manifest_files:
        manifest = load_manifest(mf)
        if manifest.config_digest != digest:
            raise CropFoldError(
                f"config digest mismatch for sample_{manifest.sample_index}: "
                f"manifest {manifest.config_digest}, config {digest}"
            )
        stored_path = raw_path(out_dir, manifest.sample_index)
        if stored_path.name not in manifest.outputs or not stored_path.exists():
            raise CropFoldError(
                f"sample_{manifest.sample_index} has no stored raw tensor to verify"
            )
        src = decode(root / manifest.source)
        regenerated = replay(src, cfg, manifest.plan)
        buf = io.BytesIO()
        write_raw(regenerated, buf)
        if buf.getvalue() == stored_path.read_bytes():
            print(f"sample_{manifest.sample_index}: ok")
        else:
            print(f"sample_{manifest.sample_index}: MISMATCH")
            mismatches.append(manifest.sample_index)
    if mismatches:
        print(f"first differing sample: sample_{mismatches[0]}", file=sys.stderr)
        return 2
    print(f"verified {len(manifest_files)} samples")
    return 0


_COMMANDS = {
    "sample": cmd_sample,
    "stats": cmd_stats,
    "bench": cmd_bench,
    "replay": cmd_replay,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; exit 2 is reserved for
        # verification mismatches, so fold usage problems into 1
        return 0 if exc.code == 0 else 1
    try:
        return _COMMANDS[args.command](args)
    except CropFoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: one subcommand per pipeline stage plus an
all-in-one ``pipeline`` run, a ``demo`` figure generator, and ``calibrate``
for fitting the crosstalk model from simulated ramp captures.

Files are the interchange contract between stages: patterns and captures are
PNG, wrapped phase is 16-bit grayscale PNG (phase * 65535), unwrapped phase
and depth travel as CFR1 float rasters, point clouds as ASCII PLY.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import fileio
from .config import (
    ConfigError,
    DEFAULT_CONFIG_YAML,
    load_camera_config,
    load_pipeline_config,
    save_camera_config,
)
from .demo import run_demo_figures
from .pattern import PatternSpec, ideal_phase, synthesize_pattern
from .pipeline import PipelineConfig, PipelineError, normalized_view, run_pipeline
from .recover import (
    apply_adjustment,
    build_adjustment,
    compensate_crosstalk,
    estimate_crosstalk,
    local_color_balance,
    wrapped_phase,
)
from .reconstruct import mean_smooth, phase_to_depth, remove_carrier
from .simulate import CameraModel, apply_camera, calibration_captures, reflect, true_unwrapped_phase
from .types import PhaseMap, UnwrappedPhaseMap
from .unwrap import UnwrapConfig, correct_phase, initial_unwrap


def _outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _add_pattern_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--cycles", type=float, default=40.0)
    p.add_argument("--orientation", choices=["horizontal", "vertical"], default="horizontal")
    p.add_argument("--mean", type=float, default=0.5)
    p.add_argument("--modulation", type=float, default=0.5)


def _spec_from_args(args) -> PatternSpec:
    return PatternSpec(
        width=args.width,
        height=args.height,
        cycles=args.cycles,
        orientation=args.orientation,
        mean_a=args.mean,
        modulation_b=args.modulation,
    )


def cmd_pattern(args) -> int:
    spec = _spec_from_args(args)
    out = _outdir(args.out)
    fileio.save_image(synthesize_pattern(spec), os.path.join(out, "pattern.png"), bit_depth=8)
    fileio.save_gray(ideal_phase(spec).phase, os.path.join(out, "pattern_phase.png"), bit_depth=16)
    return 0


def cmd_simulate(args) -> int:
    config = load_pipeline_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    camera = dataclasses.replace(config.camera, seed=config.seed)
    out = _outdir(args.out)
    capture = apply_camera(reflect(config.pattern, config.scene), camera)
    fileio.save_image(synthesize_pattern(config.pattern), os.path.join(out, "pattern.png"), bit_depth=8)
    fileio.save_image(capture, os.path.join(out, "capture.png"), bit_depth=16)
    truth = true_unwrapped_phase(config.pattern, config.scene)
    fileio.write_float_raster(truth, os.path.join(out, "truth_phase.cfr"))
    depth = np.where(config.scene.depth.mask, config.scene.depth.depth, np.nan)
    fileio.write_float_raster(depth, os.path.join(out, "truth_depth.cfr"))
    return 0


def cmd_recover(args) -> int:
    image = fileio.load_image(args.capture)
    brightness = image.brightness()
    if args.camera_config:
        cam = load_camera_config(args.camera_config)
        image = compensate_crosstalk(image, cam.crosstalk, cam.offset)
    balance_valid = None
    if args.balance_window > 0:
        image, balance_valid = local_color_balance(image, args.balance_window)
    pm = wrapped_phase(image, mask=balance_valid)
    if not args.no_adjust:
        adj = build_adjustment(pm, brightness, args.threshold, args.bins, args.samples)
        pm = apply_adjustment(pm, adj)
    out = _outdir(args.out)
    fileio.save_gray(pm.phase, os.path.join(out, "wrapped.png"), bit_depth=16)
    fileio.save_mask(pm.mask, os.path.join(out, "wrapped_mask.png"))
    return 0


def cmd_unwrap(args) -> int:
    phase = fileio.load_gray(args.phase)
    mask = fileio.load_mask(args.mask) if args.mask else np.ones(phase.shape, dtype=bool)
    # 16-bit quantization can store exactly 1.0; fold back into [0, 1)
    pm = PhaseMap(np.where(phase >= 1.0, 0.0, phase), mask)
    brightness = fileio.load_gray(args.brightness)
    cfg = UnwrapConfig(
        intensity_threshold=args.threshold,
        correction_window=args.window,
        orientation=args.orientation,
        max_seed_restarts=args.max_restarts,
    )
    u = correct_phase(initial_unwrap(pm, brightness, cfg), cfg)
    out = _outdir(args.out)
    fileio.write_float_raster(u.phase, os.path.join(out, "unwrapped.cfr"))
    vis = normalized_view(np.nan_to_num(u.phase, nan=0.0), u.mask)
    fileio.save_gray(vis, os.path.join(out, "unwrapped_vis.png"), bit_depth=8)
    if u.regions > 1:
        print(f"note: {u.regions} disconnected regions with independent offsets", file=sys.stderr)
    return 0


def cmd_reconstruct(args) -> int:
    phase = fileio.read_float_raster(args.phase)
    u = UnwrappedPhaseMap(phase, np.isfinite(phase))
    if args.carrier_cycles is not None:
        spec = PatternSpec(
            width=u.width, height=u.height,
            cycles=args.carrier_cycles, orientation=args.carrier_orientation,
        )
        u = remove_carrier(u, spec)
    depth = phase_to_depth(u, args.kappa, args.reference_depth, args.reference_phase)
    depth = mean_smooth(depth, args.smooth_window)
    out = _outdir(args.out)
    fileio.write_float_raster(depth.depth, os.path.join(out, "depth.cfr"))
    fileio.export_point_cloud(depth, os.path.join(out, "cloud.ply"), args.stride)
    return 0


def cmd_calibrate(args) -> int:
    cam = load_camera_config(args.camera_config)
    captures = calibration_captures(cam, size=(args.width, args.height))
    m, beta = estimate_crosstalk(captures)
    estimated = CameraModel(crosstalk=m, offset=beta)
    save_camera_config(estimated, args.out)
    print(json.dumps({
        "crosstalk": [[round(v, 6) for v in row] for row in m],
        "offset": [round(v, 6) for v in beta],
    }, indent=2))
    return 0


def cmd_pipeline(args) -> int:
    config = load_pipeline_config(args.config) if args.config else PipelineConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    rec = config.recovery
    if args.no_compensate:
        rec = dataclasses.replace(rec, compensate=False)
    if args.no_adjust:
        rec = dataclasses.replace(rec, adjust=False)
    for name, value in (
        ("balance_window", args.balance_window),
        ("bins", args.bins),
        ("threshold", args.threshold),
        ("sample_target", args.samples),
    ):
        if value is not None:
            rec = dataclasses.replace(rec, **{name: value})
    config = dataclasses.replace(config, recovery=rec)
    if args.window is not None:
        config = dataclasses.replace(
            config, unwrap=dataclasses.replace(config.unwrap, correction_window=args.window)
        )
    if args.smooth_window is not None:
        config = dataclasses.replace(
            config,
            reconstruct=dataclasses.replace(config.reconstruct, smooth_window=args.smooth_window),
        )
    if args.noise_sigma is not None:
        config = dataclasses.replace(
            config, camera=dataclasses.replace(config.camera, noise_sigma=args.noise_sigma)
        )
    result = run_pipeline(config, out_dir=_outdir(args.out))
    print(json.dumps(result.report, indent=2, sort_keys=True))
    return 0


def cmd_demo(args) -> int:
    run_demo_figures(_outdir(args.out))
    return 0


def cmd_init_config(args) -> int:
    with open(args.out, "w") as f:
        f.write(DEFAULT_CONFIG_YAML)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="colorfringe",
        description="Color sinusoidal fringe projection range imaging toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="synthesize the projection pattern")
    _add_pattern_flags(p)
    p.add_argument("--out", "-o", required=True, help="output directory")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("simulate", help="render a distorted capture of a scene")
    p.add_argument("--config", "-c", required=True, help="pipeline config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("recover", help="recover wrapped phase from a capture")
    p.add_argument("--capture", required=True, help="capture PNG")
    p.add_argument("--camera-config", default=None, help="camera config for crosstalk compensation")
    p.add_argument("--balance-window", type=int, default=13, help="0 disables color balance")
    p.add_argument("--bins", type=int, default=256)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--no-adjust", action="store_true", help="skip distribution adjustment")
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("unwrap", help="unwrap a wrapped-phase raster")
    p.add_argument("--phase", required=True, help="wrapped phase (16-bit grayscale PNG)")
    p.add_argument("--mask", default=None, help="validity mask PNG")
    p.add_argument("--brightness", required=True, help="brightness raster PNG")
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--window", type=int, default=11)
    p.add_argument("--orientation", choices=["horizontal", "vertical"], default="horizontal")
    p.add_argument("--max-restarts", type=int, default=64)
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_unwrap)

    p = sub.add_parser("reconstruct", help="convert unwrapped phase to depth and PLY")
    p.add_argument("--phase", required=True, help="unwrapped phase (CFR1 raster)")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--reference-depth", type=float, default=0.0)
    p.add_argument("--reference-phase", type=float, default=0.0)
    p.add_argument("--carrier-cycles", type=float, default=None,
                   help="subtract this many carrier cycles before inversion")
    p.add_argument("--carrier-orientation", choices=["horizontal", "vertical"],
                   default="horizontal")
    p.add_argument("--smooth-window", type=int, default=3)
    p.add_argument("--stride", type=int, default=4)
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("calibrate", help="fit the crosstalk model from simulated ramps")
    p.add_argument("--camera-config", required=True, help="true camera to simulate")
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--out", "-o", required=True, help="estimated camera config path (YAML)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("pipeline", help="run the full pipeline and write a report")
    p.add_argument("--config", "-c", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-compensate", action="store_true")
    p.add_argument("--no-adjust", action="store_true")
    p.add_argument("--balance-window", type=int, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--window", type=int, default=None, help="correction window override")
    p.add_argument("--smooth-window", type=int, default=None)
    p.add_argument("--noise-sigma", type=float, default=None)
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("demo", help="write demonstration figures")
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("init-config", help="write a commented default config file")
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_init_config)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error [{exc.stage}]: {exc.cause}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

"""End-to-end pipeline: synthesize, simulate, recover, unwrap, reconstruct.

Every run is deterministic given (config, seed): the config seed overrides
the camera seed, noise is drawn in a fixed order, and all stage parameters
are explicit. The machine-readable report contains only deterministic
metrics; wall-clock stage timings go to a separate document so equal seeds
yield byte-identical reports.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import fileio, metrics
from .numerics import wrap_unit
from .pattern import PatternSpec, synthesize_pattern
from .recover import (
    DEFAULT_BALANCE_WINDOW,
    DEFAULT_BINS,
    DEFAULT_SAMPLE_TARGET,
    DEFAULT_THRESHOLD,
    apply_adjustment,
    build_adjustment,
    compensate_crosstalk,
    local_color_balance,
    wrapped_phase,
)
from .reconstruct import mean_smooth, phase_to_depth, remove_carrier, threshold_mask
from .simulate import CameraModel, SceneModel, apply_camera, reflect, true_unwrapped_phase
from .types import DepthMap, PhaseMap, RgbImage, UnwrappedPhaseMap
from .unwrap import UnwrapConfig, correct_phase, initial_unwrap

__all__ = [
    "RecoveryParams",
    "ReconstructParams",
    "PipelineConfig",
    "PipelineResult",
    "PipelineError",
    "run_pipeline",
]


class PipelineError(RuntimeError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class RecoveryParams:
    compensate: bool = True
    balance_window: int = DEFAULT_BALANCE_WINDOW  # 0 disables color balance
    adjust: bool = True
    bins: int = DEFAULT_BINS
    threshold: float = DEFAULT_THRESHOLD
    sample_target: int = DEFAULT_SAMPLE_TARGET


@dataclass(frozen=True)
class ReconstructParams:
    smooth_window: int = 3
    brightness_tau: float = 0.1
    reference_phase: float = 0.0
    ply_stride: int = 4


@dataclass(frozen=True)
class PipelineConfig:
    pattern: PatternSpec = field(default_factory=PatternSpec)
    camera: CameraModel = field(default_factory=CameraModel)
    scene: SceneModel | None = None
    recovery: RecoveryParams = field(default_factory=RecoveryParams)
    unwrap: UnwrapConfig = field(default_factory=UnwrapConfig)
    reconstruct: ReconstructParams = field(default_factory=ReconstructParams)
    seed: int = 0


@dataclass
class PipelineResult:
    pattern_image: RgbImage
    capture: RgbImage
    true_unwrapped: np.ndarray
    wrapped_raw: PhaseMap
    wrapped: PhaseMap
    unwrapped: UnwrappedPhaseMap
    depth: DepthMap
    report: dict
    timings: dict


def _stage(timings: dict, name: str, fn):
    start = time.perf_counter()
    try:
        result = fn()
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc
    timings[name] = time.perf_counter() - start
    return result


def run_pipeline(config: PipelineConfig, out_dir: str | None = None) -> PipelineResult:
    """Run the full chain and, if ``out_dir`` is given, write all artifacts."""
    from .scenes import dome_scene  # avoid import cycle at module load

    timings: dict[str, float] = {}
    spec = config.pattern
    scene = config.scene
    if scene is None:
        scene = dome_scene(spec.width, spec.height)
    camera = dataclasses.replace(config.camera, seed=config.seed)
    rec = config.recovery

    pattern_image = _stage(timings, "pattern", lambda: synthesize_pattern(spec))
    reflected = _stage(timings, "reflect", lambda: reflect(spec, scene))
    truth_u = true_unwrapped_phase(spec, scene)
    capture = _stage(timings, "capture", lambda: apply_camera(reflected, camera))
    brightness = capture.brightness()

    def compensate_step() -> RgbImage:
        if not rec.compensate:
            return capture
        return compensate_crosstalk(capture, camera.crosstalk, camera.offset)

    compensated = _stage(timings, "compensate", compensate_step)

    def balance_step():
        if rec.balance_window <= 0:
            return compensated, None
        return local_color_balance(compensated, rec.balance_window)

    balanced, balance_valid = _stage(timings, "balance", balance_step)
    wrapped_raw = _stage(
        timings, "wrapped_phase", lambda: wrapped_phase(balanced, mask=balance_valid)
    )

    def adjust_step() -> PhaseMap:
        if not rec.adjust:
            return wrapped_raw
        adj = build_adjustment(
            wrapped_raw, brightness, rec.threshold, rec.bins, rec.sample_target
        )
        return apply_adjustment(wrapped_raw, adj)

    wrapped = _stage(timings, "adjust", adjust_step)

    unwrapped_initial = _stage(
        timings, "unwrap", lambda: initial_unwrap(wrapped, brightness, config.unwrap)
    )
    unwrapped = _stage(
        timings, "correct", lambda: correct_phase(unwrapped_initial, config.unwrap)
    )

    def depth_step() -> DepthMap:
        dm = phase_to_depth(
            remove_carrier(unwrapped, spec),
            scene.kappa,
            scene.reference_depth,
            config.reconstruct.reference_phase,
        )
        reliable = dm.mask & threshold_mask(capture, config.reconstruct.brightness_tau)
        dm = DepthMap(dm.depth, reliable)
        return mean_smooth(dm, config.reconstruct.smooth_window)

    depth = _stage(timings, "depth", depth_step)

    truth_wrapped = wrap_unit(truth_u)
    report = {
        "seed": config.seed,
        "width": spec.width,
        "height": spec.height,
        "cycles": spec.cycles,
        "noise_sigma": camera.noise_sigma,
        "compensate": rec.compensate,
        "balance_window": rec.balance_window,
        "adjust": rec.adjust,
        "valid_fraction_wrapped": float(wrapped.mask.mean()),
        "valid_fraction_unwrapped": float(unwrapped.mask.mean()),
        "valid_fraction_depth": float(depth.mask.mean()),
        "regions": unwrapped.regions,
        "rms_wrapped_error_unadjusted": metrics.circular_rms(
            wrapped_raw.phase, truth_wrapped, wrapped_raw.mask
        ),
        "rms_wrapped_error_unadjusted_centered": metrics.circular_rms_centered(
            wrapped_raw.phase, truth_wrapped, wrapped_raw.mask
        ),
        "rms_wrapped_error": metrics.circular_rms(
            wrapped.phase, truth_wrapped, wrapped.mask
        ),
        "rms_wrapped_error_centered": metrics.circular_rms_centered(
            wrapped.phase, truth_wrapped, wrapped.mask
        ),
        "max_wrapped_error": metrics.circular_max(
            wrapped.phase, truth_wrapped, wrapped.mask
        ),
        "period_index_accuracy": metrics.period_index_accuracy(
            wrapped.phase, unwrapped.phase, truth_u, unwrapped.mask
        ),
        "rms_depth_error": metrics.aligned_depth_rms(
            depth.depth, scene.depth.depth, depth.mask & scene.depth.mask
        ),
    }

    if out_dir is not None:
        _stage(
            timings,
            "export",
            lambda: _write_artifacts(
                out_dir, config, pattern_image, capture, truth_u, scene,
                wrapped, unwrapped, depth, report,
            ),
        )
        with open(os.path.join(out_dir, "timings.json"), "w") as f:
            json.dump(timings, f, indent=2, sort_keys=True)

    return PipelineResult(
        pattern_image=pattern_image,
        capture=capture,
        true_unwrapped=truth_u,
        wrapped_raw=wrapped_raw,
        wrapped=wrapped,
        unwrapped=unwrapped,
        depth=depth,
        report=report,
        timings=timings,
    )


def normalized_view(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Min/max-normalize valid values to [0, 1] for an 8-bit visualization."""
    out = np.zeros_like(values, dtype=np.float64)
    if mask.any():
        v = values[mask]
        lo, hi = float(v.min()), float(v.max())
        span = hi - lo if hi > lo else 1.0
        out[mask] = (values[mask] - lo) / span
    return out


def _write_artifacts(
    out_dir, config, pattern_image, capture, truth_u, scene,
    wrapped, unwrapped, depth, report,
) -> None:
    os.makedirs(out_dir, exist_ok=True)

    def join(name: str) -> str:
        return os.path.join(out_dir, name)

    fileio.save_image(pattern_image, join("pattern.png"), bit_depth=8)
    fileio.save_image(capture, join("capture.png"), bit_depth=16)
    fileio.write_float_raster(truth_u, join("truth_phase.cfr"))
    fileio.write_float_raster(
        np.where(scene.depth.mask, scene.depth.depth, np.nan), join("truth_depth.cfr")
    )
    fileio.save_gray(wrapped.phase, join("wrapped.png"), bit_depth=16)
    fileio.save_mask(wrapped.mask, join("wrapped_mask.png"))
    fileio.write_float_raster(unwrapped.phase, join("unwrapped.cfr"))
    vis = normalized_view(np.nan_to_num(unwrapped.phase, nan=0.0), unwrapped.mask)
    fileio.save_gray(vis, join("unwrapped_vis.png"), bit_depth=8)
    fileio.write_float_raster(depth.depth, join("depth.cfr"))
    fileio.export_point_cloud(depth, join("cloud.ply"), config.reconstruct.ply_stride)
    with open(join("report.json"), "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)

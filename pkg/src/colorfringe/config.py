"""YAML configuration loading for cameras, scenes, and whole pipeline runs.

The config file is a human-readable key/value tree; every section is
optional and falls back to defaults. Unknown keys raise, so typos fail
loudly instead of silently running with defaults.
"""

from __future__ import annotations

import numpy as np
import yaml

from . import scenes
from .fileio import load_image, read_float_raster
from .pattern import PatternSpec
from .pipeline import PipelineConfig, ReconstructParams, RecoveryParams
from .simulate import CameraModel, SceneModel
from .types import DepthMap
from .unwrap import UnwrapConfig

__all__ = [
    "ConfigError",
    "load_document",
    "build_pattern",
    "build_camera",
    "build_scene",
    "build_pipeline_config",
    "load_pipeline_config",
    "load_camera_config",
    "camera_to_document",
    "save_camera_config",
    "DEFAULT_CONFIG_YAML",
]


class ConfigError(ValueError):
    pass


def load_document(path: str) -> dict:
    with open(path) as f:
        doc = yaml.safe_load(f)
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"config root must be a mapping: {path}")
    return doc


def _section(doc: dict, name: str, allowed: set[str]) -> dict:
    sub = doc.get(name) or {}
    if not isinstance(sub, dict):
        raise ConfigError(f"'{name}' must be a mapping")
    unknown = set(sub) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {sorted(unknown)}")
    return sub


def build_pattern(doc: dict) -> PatternSpec:
    sub = _section(doc, "pattern", {"width", "height", "cycles", "orientation", "mean", "modulation"})
    return PatternSpec(
        width=int(sub.get("width", 640)),
        height=int(sub.get("height", 480)),
        cycles=float(sub.get("cycles", 40.0)),
        orientation=sub.get("orientation", "horizontal"),
        mean_a=float(sub.get("mean", 0.5)),
        modulation_b=float(sub.get("modulation", 0.5)),
    )


def build_camera(doc: dict) -> CameraModel:
    sub = _section(doc, "camera", {"crosstalk", "offset", "gamma", "response_curve", "noise_sigma", "seed"})
    kwargs: dict = {
        "noise_sigma": float(sub.get("noise_sigma", 0.0)),
        "seed": int(sub.get("seed", 0)),
    }
    if "crosstalk" in sub:
        kwargs["crosstalk"] = np.asarray(sub["crosstalk"], dtype=np.float64)
    if "offset" in sub:
        kwargs["offset"] = np.asarray(sub["offset"], dtype=np.float64)
    if "response_curve" in sub:
        if "gamma" in sub:
            raise ConfigError("give either camera.gamma or camera.response_curve, not both")
        curve = sub["response_curve"]
        xs = np.asarray(curve["x"], dtype=np.float64)
        ys = curve["y"]
        kwargs["gamma"] = None
        kwargs["response_curves"] = tuple(
            (xs, np.asarray(y, dtype=np.float64)) for y in ys
        )
    elif "gamma" in sub:
        g = sub["gamma"]
        kwargs["gamma"] = tuple(float(v) for v in (g if isinstance(g, (list, tuple)) else [g] * 3))
    return CameraModel(**kwargs)


def _build_depth(sub: dict, width: int, height: int, kappa: float) -> np.ndarray | str:
    shape = sub.get("shape", "flat")
    if shape == "file":
        return str(sub["path"])
    if shape == "flat":
        return np.full((height, width), float(sub.get("depth", 0.0)))
    if shape == "tilted":
        return scenes.tilted_plane_scene(
            width, height, kappa,
            x_shift_cycles=float(sub.get("x_shift_cycles", 1.0)),
            y_shift_cycles=float(sub.get("y_shift_cycles", 0.0)),
        ).depth.depth
    if shape == "dome":
        return scenes.dome_scene(
            width, height, kappa,
            peak_shift_cycles=float(sub.get("peak_shift_cycles", 5.0)),
            radius=float(sub["radius"]) if "radius" in sub else None,
        ).depth.depth
    raise ConfigError(f"unknown scene depth shape: {shape!r}")


def build_scene(doc: dict, width: int, height: int) -> SceneModel:
    sub = _section(doc, "scene", {"kappa", "reference_depth", "depth", "albedo"})
    kappa = float(sub.get("kappa", 0.05))
    reference_depth = float(sub.get("reference_depth", 0.0))

    depth_sub = sub.get("depth") or {}
    if not isinstance(depth_sub, dict):
        raise ConfigError("'scene.depth' must be a mapping")
    depth = _build_depth(depth_sub, width, height, kappa)
    if isinstance(depth, str):
        z = read_float_raster(depth)
        depth_map = DepthMap(z, np.isfinite(z))
    else:
        depth_map = DepthMap(depth, np.ones(depth.shape, dtype=bool))

    albedo_sub = sub.get("albedo") or {}
    if not isinstance(albedo_sub, dict):
        raise ConfigError("'scene.albedo' must be a mapping")
    kind = albedo_sub.get("kind", "uniform")
    if kind == "uniform":
        rho = albedo_sub.get("rho", (1.0, 1.0, 1.0))
        if isinstance(rho, (int, float)):
            rho = (rho,) * 3
        albedo = scenes.uniform_albedo(width, height, rho)
    elif kind == "sinusoid":
        albedo = scenes.sinusoid_albedo(
            width, height,
            mean=tuple(albedo_sub.get("mean", (0.6, 0.6, 0.6))),
            amplitude=tuple(albedo_sub.get("amplitude", (0.3, 0.25, 0.2))),
            periods=tuple(albedo_sub.get("periods", (1.0, 1.0, 1.0))),
            phases=tuple(albedo_sub.get("phases", (0.0, 0.3, 0.6))),
        )
    elif kind == "file":
        albedo = load_image(str(albedo_sub["path"])).data
    else:
        raise ConfigError(f"unknown albedo kind: {kind!r}")

    return SceneModel(depth=depth_map, albedo=albedo, kappa=kappa, reference_depth=reference_depth)


def build_pipeline_config(doc: dict) -> PipelineConfig:
    known = {"seed", "pattern", "camera", "scene", "recovery", "unwrap", "reconstruct"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown top-level config keys: {sorted(unknown)}")
    pattern = build_pattern(doc)
    camera = build_camera(doc)
    scene = build_scene(doc, pattern.width, pattern.height)

    rec = _section(doc, "recovery", {"compensate", "balance_window", "adjust", "bins", "threshold", "samples"})
    recovery = RecoveryParams(
        compensate=bool(rec.get("compensate", True)),
        balance_window=int(rec.get("balance_window", RecoveryParams.balance_window)),
        adjust=bool(rec.get("adjust", True)),
        bins=int(rec.get("bins", RecoveryParams.bins)),
        threshold=float(rec.get("threshold", RecoveryParams.threshold)),
        sample_target=int(rec.get("samples", RecoveryParams.sample_target)),
    )

    unw = _section(doc, "unwrap", {"threshold", "window", "orientation", "max_restarts"})
    unwrap_cfg = UnwrapConfig(
        intensity_threshold=float(unw.get("threshold", UnwrapConfig.intensity_threshold)),
        correction_window=int(unw.get("window", UnwrapConfig.correction_window)),
        orientation=unw.get("orientation", pattern.orientation),
        max_seed_restarts=int(unw.get("max_restarts", UnwrapConfig.max_seed_restarts)),
    )

    rcn = _section(doc, "reconstruct", {"smooth_window", "tau", "reference_phase", "stride"})
    reconstruct = ReconstructParams(
        smooth_window=int(rcn.get("smooth_window", ReconstructParams.smooth_window)),
        brightness_tau=float(rcn.get("tau", ReconstructParams.brightness_tau)),
        reference_phase=float(rcn.get("reference_phase", ReconstructParams.reference_phase)),
        ply_stride=int(rcn.get("stride", ReconstructParams.ply_stride)),
    )

    return PipelineConfig(
        pattern=pattern,
        camera=camera,
        scene=scene,
        recovery=recovery,
        unwrap=unwrap_cfg,
        reconstruct=reconstruct,
        seed=int(doc.get("seed", 0)),
    )


def load_pipeline_config(path: str) -> PipelineConfig:
    return build_pipeline_config(load_document(path))


def load_camera_config(path: str) -> CameraModel:
    """Load a camera from a config file (its 'camera' section, or a bare
    mapping of camera keys)."""
    doc = load_document(path)
    if "camera" not in doc:
        doc = {"camera": doc}
    return build_camera(doc)


def camera_to_document(cam: CameraModel) -> dict:
    doc = {
        "crosstalk": [[float(v) for v in row] for row in cam.crosstalk],
        "offset": [float(v) for v in cam.offset],
        "noise_sigma": float(cam.noise_sigma),
        "seed": int(cam.seed),
    }
    if cam.gamma is not None:
        doc["gamma"] = list(cam.gamma)
    else:
        xs = cam.response_curves[0][0]
        doc["response_curve"] = {
            "x": [float(v) for v in xs],
            "y": [[float(v) for v in ys] for _, ys in cam.response_curves],
        }
    return doc


def save_camera_config(cam: CameraModel, path: str) -> None:
    with open(path, "w") as f:
        yaml.safe_dump({"camera": camera_to_document(cam)}, f, sort_keys=True)


DEFAULT_CONFIG_YAML = """\
# colorfringe pipeline configuration
seed: 0
pattern:
  width: 640
  height: 480
  cycles: 40
  orientation: horizontal   # horizontal stripes: phase varies along y
  mean: 0.5
  modulation: 0.5
camera:
  crosstalk:
    - [0.90, 0.08, 0.02]
    - [0.10, 0.80, 0.10]
    - [0.03, 0.12, 0.85]
  offset: [0.02, 0.02, 0.02]
  gamma: [2.2, 2.2, 2.2]
  noise_sigma: 0.0
  seed: 0
scene:
  kappa: 0.05               # cycles of phase shift per depth unit
  reference_depth: 0.0
  depth:
    shape: dome             # flat | tilted | dome | file
    peak_shift_cycles: 5.0
  albedo:
    kind: uniform           # uniform | sinusoid | file
recovery:
  compensate: true
  balance_window: 13        # 0 disables local color balance
  adjust: true
  bins: 256
  threshold: 0.1
  samples: 10000
unwrap:
  threshold: 0.1
  window: 11
  max_restarts: 64
reconstruct:
  smooth_window: 3
  tau: 0.1
  reference_phase: 0.0
  stride: 4
"""

"""colorfringe: color sinusoidal fringe projection range imaging.

Pattern synthesis, projector-camera distortion simulation, wrapped-phase
recovery with crosstalk/nonlinearity compensation, phase unwrapping and
correction, and phase-to-depth reconstruction, all verifiable against
simulator ground truth.
"""

from .fileio import export_point_cloud, load_image, save_image
from .pattern import PatternSpec, ideal_phase, synthesize_pattern
from .pipeline import PipelineConfig, PipelineResult, run_pipeline
from .recover import (
    PhaseAdjustment,
    apply_adjustment,
    build_adjustment,
    compensate_crosstalk,
    estimate_crosstalk,
    local_color_balance,
    wrapped_phase,
)
from .reconstruct import mean_smooth, phase_to_depth, threshold_mask
from .simulate import (
    CameraModel,
    SceneModel,
    apply_camera,
    calibration_captures,
    default_distortion,
    identity_camera,
    reflect,
    true_unwrapped_phase,
)
from .types import DepthMap, PhaseMap, RgbImage, UnwrappedPhaseMap
from .unwrap import UnwrapConfig, correct_phase, initial_unwrap

__version__ = "0.1.0"

__all__ = [
    "RgbImage",
    "PhaseMap",
    "UnwrappedPhaseMap",
    "DepthMap",
    "PatternSpec",
    "ideal_phase",
    "synthesize_pattern",
    "CameraModel",
    "SceneModel",
    "identity_camera",
    "default_distortion",
    "reflect",
    "true_unwrapped_phase",
    "apply_camera",
    "calibration_captures",
    "estimate_crosstalk",
    "compensate_crosstalk",
    "local_color_balance",
    "wrapped_phase",
    "PhaseAdjustment",
    "build_adjustment",
    "apply_adjustment",
    "UnwrapConfig",
    "initial_unwrap",
    "correct_phase",
    "threshold_mask",
    "phase_to_depth",
    "mean_smooth",
    "load_image",
    "save_image",
    "export_point_cloud",
    "PipelineConfig",
    "PipelineResult",
    "run_pipeline",
]

"""Synthetic demonstration figures: pattern profile, response curves,
phase histograms before/after adjustment, and a wrapped-phase image."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .fileio import save_gray
from .pattern import PatternSpec, synthesize_pattern
from .recover import apply_adjustment, build_adjustment, wrapped_phase
from .scenes import tilted_plane_scene
from .simulate import CameraModel, apply_camera, calibration_captures, default_distortion, reflect

__all__ = ["pattern_profile", "run_demo_figures"]


def pattern_profile(spec: PatternSpec, length: int | None = None):
    """Channel intensities along the stripe-normal axis; returns
    (positions, c1, c2, c3). This is exactly the data the profile figure
    plots, exposed so it can be checked against the synthesis equations."""
    image = synthesize_pattern(spec)
    if spec.orientation == "horizontal":
        line = image.data[:, 0, :]
    else:
        line = image.data[0, :, :]
    if length is not None:
        line = line[:length]
    positions = np.arange(line.shape[0])
    return positions, line[:, 0], line[:, 1], line[:, 2]


def _profile_figure(spec: PatternSpec, path: str) -> None:
    cycle_px = max(int(round(spec.extent / spec.cycles)), 1)
    pos, c1, c2, c3 = pattern_profile(spec, length=3 * cycle_px + 1)
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(pos, c1, "r-", label="C1 (R)")
    ax.plot(pos, c2, "g-", label="C2 (G)")
    ax.plot(pos, c3, "b-", label="C3 (B)")
    ax.set_xlabel("pixel along stripe-normal axis")
    ax.set_ylabel("intensity")
    ax.set_title("Three-phase sinusoids in RGB channels")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _response_figure(cam: CameraModel, path: str) -> None:
    captures = calibration_captures(cam, size=(256, 8))
    t = np.linspace(0.0, 1.0, 256)
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.2), sharey=True)
    names = "RGB"
    for k, (ax, cap) in enumerate(zip(axes, captures)):
        row = cap.data[cap.height // 2]
        for i, color in enumerate(("r", "g", "b")):
            ax.plot(t, row[:, i], color + "-", label=f"camera {names[i]}")
        ax.set_title(f"projector {names[k]} ramp")
        ax.set_xlabel("projector intensity")
    axes[0].set_ylabel("captured intensity")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _demo_capture(spec: PatternSpec, cam: CameraModel):
    scene = tilted_plane_scene(spec.width, spec.height, x_shift_cycles=1.0)
    return apply_camera(reflect(spec, scene), cam)


def _histogram_figure(spec: PatternSpec, cam: CameraModel, path: str) -> None:
    capture = _demo_capture(spec, cam)
    raw = wrapped_phase(capture)
    adj = build_adjustment(raw, capture.brightness())
    adjusted = apply_adjustment(raw, adj)
    fig, axes = plt.subplots(2, 1, figsize=(7, 4.6), sharex=True)
    for ax, pm, title in (
        (axes[0], raw, "original phase distribution"),
        (axes[1], adjusted, "adjusted phase distribution"),
    ):
        ax.hist(pm.phase[pm.mask], bins=64, range=(0.0, 1.0), color="0.3")
        ax.set_title(title, fontsize=9)
    axes[1].set_xlabel("wrapped phase (cycles)")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _wrapped_image(spec: PatternSpec, cam: CameraModel, path: str) -> None:
    capture = _demo_capture(spec, cam)
    pm = wrapped_phase(capture)
    save_gray(pm.phase, path, bit_depth=8)


def run_demo_figures(
    out_dir: str,
    spec: PatternSpec | None = None,
    cam: CameraModel | None = None,
) -> list[str]:
    """Write the four demonstration figures; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    spec = spec or PatternSpec()
    cam = cam or default_distortion()
    paths = {
        "profile": os.path.join(out_dir, "pattern_profile.png"),
        "response": os.path.join(out_dir, "response_curves.png"),
        "histograms": os.path.join(out_dir, "phase_histograms.png"),
        "wrapped": os.path.join(out_dir, "wrapped_phase.png"),
    }
    _profile_figure(spec, paths["profile"])
    _response_figure(cam, paths["response"])
    _histogram_figure(spec, cam, paths["histograms"])
    _wrapped_image(spec, cam, paths["wrapped"])
    return list(paths.values())

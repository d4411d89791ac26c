"""Synthetic scene builders for simulation runs and tests."""

from __future__ import annotations

import numpy as np

from .simulate import SceneModel
from .types import DepthMap

__all__ = [
    "uniform_albedo",
    "sinusoid_albedo",
    "flat_scene",
    "tilted_plane_scene",
    "dome_scene",
]


def uniform_albedo(width: int, height: int, rho=(1.0, 1.0, 1.0)) -> np.ndarray:
    albedo = np.empty((height, width, 3))
    albedo[:] = np.asarray(rho, dtype=np.float64)
    return albedo


def sinusoid_albedo(
    width: int,
    height: int,
    mean=(0.6, 0.6, 0.6),
    amplitude=(0.3, 0.25, 0.2),
    periods=(1.0, 1.0, 1.0),
    phases=(0.0, 0.3, 0.6),
) -> np.ndarray:
    """Smooth per-channel albedo varying sinusoidally along x.

    ``periods`` counts full albedo cycles across the image width; keep it
    small so the variation stays slow compared to any balance window.
    """
    x = np.arange(width, dtype=np.float64) / width
    albedo = np.empty((height, width, 3))
    for i in range(3):
        row = mean[i] + amplitude[i] * np.sin(2.0 * np.pi * (periods[i] * x + phases[i]))
        albedo[:, :, i] = row[None, :]
    return np.clip(albedo, 0.0, 1.0)


def _scene(depth: np.ndarray, albedo, kappa: float, reference_depth: float) -> SceneModel:
    h, w = depth.shape
    if albedo is None:
        albedo = uniform_albedo(w, h)
    return SceneModel(
        depth=DepthMap(depth, np.ones(depth.shape, dtype=bool)),
        albedo=albedo,
        kappa=kappa,
        reference_depth=reference_depth,
    )


def flat_scene(
    width: int,
    height: int,
    kappa: float = 0.05,
    depth: float = 0.0,
    reference_depth: float = 0.0,
    albedo=None,
) -> SceneModel:
    """Plane of constant depth (zero phase shift when depth == reference)."""
    z = np.full((height, width), depth, dtype=np.float64)
    return _scene(z, albedo, kappa, reference_depth)


def tilted_plane_scene(
    width: int,
    height: int,
    kappa: float = 0.05,
    x_shift_cycles: float = 1.0,
    y_shift_cycles: float = 0.0,
    reference_depth: float = 0.0,
    albedo=None,
) -> SceneModel:
    """Plane tilted so the phase shift ramps by the given cycle counts
    across the image; keeps the phase differential constant while making the
    observed phase distribution continuous."""
    x = np.arange(width, dtype=np.float64) / width
    y = np.arange(height, dtype=np.float64) / height
    z = (x_shift_cycles * x[None, :] + y_shift_cycles * y[:, None]) / kappa
    return _scene(z + reference_depth, albedo, kappa, reference_depth)


def dome_scene(
    width: int,
    height: int,
    kappa: float = 0.05,
    peak_shift_cycles: float = 5.0,
    radius: float | None = None,
    center: tuple[float, float] | None = None,
    reference_depth: float = 0.0,
    albedo=None,
) -> SceneModel:
    """Smooth raised-cosine dome on a flat plane.

    The profile peak * cos^2(pi r / (2 radius)) reaches ``peak_shift_cycles``
    of phase shift at the apex and has zero slope at both apex and rim, so
    neighbor phase steps stay well below half a cycle (a spherical profile
    would not: its rim slope is unbounded).
    """
    if radius is None:
        radius = 0.35 * min(width, height)
    if center is None:
        center = (height / 2.0, width / 2.0)
    peak = peak_shift_cycles / kappa
    yy, xx = np.mgrid[0:height, 0:width]
    r = np.hypot(yy - center[0], xx - center[1])
    z = np.where(r < radius, peak * np.cos(np.pi * r / (2.0 * radius)) ** 2, 0.0)
    return _scene(z + reference_depth, albedo, kappa, reference_depth)

"""Unwrapped phase to depth, smoothing, and reliability masking."""

from __future__ import annotations

import cv2
import numpy as np

from .pattern import PatternSpec, unwrapped_ramp
from .types import DepthMap, RgbImage, UnwrappedPhaseMap

__all__ = ["threshold_mask", "remove_carrier", "phase_to_depth", "mean_smooth"]


def threshold_mask(image: RgbImage, tau: float) -> np.ndarray:
    """Pixels whose brightness (channel mean) reaches tau are valid."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    return image.brightness() >= tau


def remove_carrier(u: UnwrappedPhaseMap, spec: PatternSpec) -> UnwrappedPhaseMap:
    """Subtract the pattern's own phase ramp, leaving depth-induced shift.

    The unwrapped capture phase is carrier + kappa * dz (+ an arbitrary
    integer); after carrier removal a scalar reference phase suffices for
    the linear depth inversion.
    """
    shift = u.phase - unwrapped_ramp(spec)
    return UnwrappedPhaseMap(np.where(u.mask, shift, np.nan), u.mask, regions=u.regions)


def phase_to_depth(
    u: UnwrappedPhaseMap,
    kappa: float,
    reference_depth: float = 0.0,
    reference_phase: float = 0.0,
) -> DepthMap:
    """Invert the linear forward model: z = ref + (phi - ref_phase) / kappa."""
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    z = reference_depth + (u.phase - reference_phase) / kappa
    return DepthMap(np.where(u.mask, z, np.nan), u.mask)


def mean_smooth(depth: DepthMap, window: int = 3) -> DepthMap:
    """Mean filter over valid depths; window truncates at borders and masks.

    window = 1 is the identity.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"smoothing window must be odd and >= 1, got {window}")
    if window == 1:
        return depth
    ksize = (window, window)
    filled = np.where(depth.mask, depth.depth, 0.0)
    sums = cv2.boxFilter(filled, -1, ksize, normalize=False, borderType=cv2.BORDER_CONSTANT)
    counts = cv2.boxFilter(
        depth.mask.astype(np.float64), -1, ksize, normalize=False,
        borderType=cv2.BORDER_CONSTANT,
    )
    smoothed = np.where(depth.mask, sums / np.maximum(counts, 1.0), np.nan)
    return DepthMap(smoothed, depth.mask)

"""Error metrics against simulator ground truth.

Wrapped-phase errors are circular (differences taken modulo one cycle).
Because the system's absolute phase origin is arbitrary (the distribution
adjustment anchors at its sample minimum and unwrapping adds an arbitrary
integer), offset-removed variants are provided alongside the raw ones; depth
is compared after median alignment.
"""

from __future__ import annotations

import numpy as np

from .numerics import circular_difference

__all__ = [
    "circular_rms",
    "circular_max",
    "circular_rms_centered",
    "period_index_accuracy",
    "aligned_depth_rms",
]


def _masked_diff(recovered: np.ndarray, truth: np.ndarray, mask: np.ndarray) -> np.ndarray:
    d = circular_difference(recovered, truth)
    return d[np.asarray(mask, dtype=bool)]


def circular_rms(recovered, truth, mask) -> float:
    """RMS of the wrapped difference over valid pixels, in cycles."""
    d = _masked_diff(recovered, truth, mask)
    return float(np.sqrt(np.mean(d * d))) if d.size else float("nan")


def circular_max(recovered, truth, mask) -> float:
    d = _masked_diff(recovered, truth, mask)
    return float(np.abs(d).max()) if d.size else float("nan")


def circular_rms_centered(recovered, truth, mask) -> float:
    """Circular RMS after removing the circular-mean offset."""
    d = _masked_diff(recovered, truth, mask)
    if not d.size:
        return float("nan")
    angle = 2.0 * np.pi * d
    offset = np.arctan2(np.sin(angle).mean(), np.cos(angle).mean()) / (2.0 * np.pi)
    centered = circular_difference(d, offset)
    return float(np.sqrt(np.mean(centered * centered)))


def period_index_accuracy(
    measured_wrapped: np.ndarray,
    unwrapped: np.ndarray,
    true_unwrapped: np.ndarray,
    mask: np.ndarray,
) -> float:
    """Fraction of valid pixels whose assigned period index is correct up to
    one global integer.

    The unwrapper's index is the integer it added to the measured wrapped
    phase; the correct index for a pixel is the one bringing that measured
    phase closest to the true unwrapped phase. The comparison is normalized
    by the most common index difference (the arbitrary global offset).
    """
    m = np.asarray(mask, dtype=bool)
    if not m.any():
        return float("nan")
    assigned = np.rint(unwrapped[m] - measured_wrapped[m]).astype(np.int64)
    ideal = np.rint(true_unwrapped[m] - measured_wrapped[m]).astype(np.int64)
    diff = assigned - ideal
    values, counts = np.unique(diff, return_counts=True)
    global_offset = values[counts.argmax()]
    return float(np.mean(diff == global_offset))


def aligned_depth_rms(recovered: np.ndarray, truth: np.ndarray, mask: np.ndarray) -> float:
    """Depth RMS after removing the median offset (global unwrap constant)."""
    m = np.asarray(mask, dtype=bool)
    if not m.any():
        return float("nan")
    d = recovered[m] - truth[m]
    d = d - np.median(d)
    return float(np.sqrt(np.mean(d * d)))

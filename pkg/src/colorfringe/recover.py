"""Wrapped color-phase recovery from a distorted capture.

Four stages, each usable on its own: crosstalk compensation (inverse of the
affine 3x3 mixing model, fitted from calibration ramps), local color balance
(divide each channel by its window mean to cancel slowly varying albedo),
the arctangent wrapped phase, and distribution adjustment (remap phases
through the empirical CDF of a bright-pixel sample so their distribution
becomes uniform, which cancels monotone response nonlinearity without any
reference chart).
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from .numerics import wrap_unit
from .types import PhaseMap, RgbImage

__all__ = [
    "EstimationError",
    "AdjustmentError",
    "estimate_crosstalk",
    "compensate_crosstalk",
    "local_color_balance",
    "wrapped_phase",
    "PhaseAdjustment",
    "build_adjustment",
    "apply_adjustment",
]

BALANCE_EPSILON = 1e-4
DEGENERATE_EPSILON = 1e-9
RAMP_FIT_RANGE = (0.2, 0.8)  # quasi-linear mid-range, reduces nonlinearity bias

DEFAULT_BALANCE_WINDOW = 13   # one observed ~12 px cycle, rounded up to odd
DEFAULT_BINS = 256
DEFAULT_THRESHOLD = 0.1
DEFAULT_SAMPLE_TARGET = 10_000


class EstimationError(ValueError):
    """Calibration captures cannot support an affine fit."""


class AdjustmentError(ValueError):
    """Not enough qualifying pixels to build a phase adjustment."""


def estimate_crosstalk(
    captures: tuple[RgbImage, RgbImage, RgbImage],
    fit_range: tuple[float, float] = RAMP_FIT_RANGE,
) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares affine fit C_cam = M @ C_proj + beta from ramp captures.

    ``captures[k]`` must come from a linear ramp on projector channel k
    (value x/(w-1) at column x, other channels dark). Only samples whose
    projector value lies in ``fit_range`` enter the fit.
    """
    lo, hi = fit_range
    rows_a = []
    rows_b = []
    for k, cap in enumerate(captures):
        t = np.linspace(0.0, 1.0, cap.width)
        cols = np.nonzero((t >= lo) & (t <= hi))[0]
        proj = np.zeros((cols.size, 3))
        proj[:, k] = t[cols]
        # every pixel of a qualifying column is one sample
        rows_a.append(np.repeat(proj, cap.height, axis=0))
        rows_b.append(cap.data[:, cols, :].transpose(1, 0, 2).reshape(-1, 3))
    a = np.concatenate(rows_a, axis=0)
    b = np.concatenate(rows_b, axis=0)
    design = np.concatenate([a, np.ones((a.shape[0], 1))], axis=1)
    solution, _, rank, _ = np.linalg.lstsq(design, b, rcond=None)
    if rank < 4:
        raise EstimationError("rank-deficient calibration samples; ramps unfittable")
    m_hat = solution[:3, :].T.copy()
    singulars = np.linalg.svd(m_hat, compute_uv=False)
    if singulars[0] == 0.0 or singulars[-1] < 1e-10 * singulars[0]:
        raise EstimationError(
            "captures carry no usable ramp response (e.g. constant images); unfittable"
        )
    return m_hat, solution[3, :].copy()


def compensate_crosstalk(image: RgbImage, m: np.ndarray, beta: np.ndarray) -> RgbImage:
    """Invert the affine mixing model: output = M^-1 (C - beta), no clamp.

    Downstream phase math is invariant to common affine changes, so values
    outside [0, 1] are left as they are.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3):
        raise ValueError(f"crosstalk matrix must be 3x3, got {m.shape}")
    if np.linalg.cond(m) > 1e12:
        raise ValueError("crosstalk matrix is singular")
    inv = np.linalg.inv(m)
    return RgbImage((image.data - np.asarray(beta, dtype=np.float64)) @ inv.T)


def _window_mean(values: np.ndarray, window: int) -> np.ndarray:
    """Border-truncated box mean: sums and counts both stop at the edges."""
    ksize = (window, window)
    sums = cv2.boxFilter(values, -1, ksize, normalize=False, borderType=cv2.BORDER_CONSTANT)
    ones = np.ones(values.shape[:2], dtype=np.float64)
    counts = cv2.boxFilter(ones, -1, ksize, normalize=False, borderType=cv2.BORDER_CONSTANT)
    if values.ndim == 3:
        counts = counts[:, :, None]
    return sums / counts


def local_color_balance(image: RgbImage, window: int) -> tuple[RgbImage, np.ndarray]:
    """Divide each channel by its window mean; returns (balanced, valid).

    Pixels where any channel's window mean falls below a small epsilon are
    flagged invalid (and set to zero) rather than raising.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError(f"balance window must be odd and >= 3, got {window}")
    mean = _window_mean(image.data, window)
    valid = (mean > BALANCE_EPSILON).all(axis=2)
    safe = np.where(mean > BALANCE_EPSILON, mean, 1.0)
    balanced = np.where(valid[:, :, None], image.data / safe, 0.0)
    return RgbImage(balanced), valid


def wrapped_phase(image: RgbImage, mask: np.ndarray | None = None) -> PhaseMap:
    """Arctangent wrapped phase in [0, 1) cycles.

    phi = atan2(sqrt(3) (C1 - C3), 2 C2 - C1 - C3) / 2pi. Pixels where both
    arguments are below 1e-9 in magnitude carry no phase and are masked.
    """
    c1 = image.data[:, :, 0]
    c2 = image.data[:, :, 1]
    c3 = image.data[:, :, 2]
    num = np.sqrt(3.0) * (c1 - c3)
    den = 2.0 * c2 - c1 - c3
    degenerate = (np.abs(num) < DEGENERATE_EPSILON) & (np.abs(den) < DEGENERATE_EPSILON)
    phase = wrap_unit(np.arctan2(num, den) / (2.0 * np.pi))
    valid = ~degenerate
    if mask is not None:
        valid &= np.asarray(mask, dtype=bool)
    return PhaseMap(np.where(valid, phase, np.nan), valid)


@dataclass(frozen=True)
class PhaseAdjustment:
    """Sorted phase sample defining the empirical-CDF uniformization map."""

    quantiles: np.ndarray
    bins: int
    threshold: float

    def __post_init__(self):
        q = np.ascontiguousarray(self.quantiles, dtype=np.float64)
        if q.ndim != 1:
            raise ValueError("quantiles must be 1-D")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if q.size < self.bins:
            raise ValueError(f"need at least {self.bins} samples, got {q.size}")
        if (np.diff(q) < 0).any():
            raise ValueError("quantiles must be sorted nondecreasing")
        if q.size and (q[0] < 0 or q[-1] >= 1):
            raise ValueError("quantiles must lie in [0, 1)")
        object.__setattr__(self, "quantiles", q)


def build_adjustment(
    phase: PhaseMap,
    intensity: np.ndarray,
    threshold: float = DEFAULT_THRESHOLD,
    bins: int = DEFAULT_BINS,
    sample_target: int = DEFAULT_SAMPLE_TARGET,
) -> PhaseAdjustment:
    """Sample bright valid pixels and store their sorted phases.

    Subsampling is a fixed stride over row-major order so the result is
    deterministic; roughly ``sample_target`` pixels are kept.
    """
    if sample_target < bins:
        raise ValueError("sample_target must be >= bins")
    qualify = phase.mask & (np.asarray(intensity, dtype=np.float64) >= threshold)
    flat = phase.phase.ravel()[qualify.ravel()]
    if flat.size < bins:
        raise AdjustmentError(
            f"only {flat.size} pixels above threshold {threshold}; need >= {bins}"
        )
    stride = max(1, flat.size // sample_target)
    samples = np.sort(flat[::stride])
    return PhaseAdjustment(samples, bins, threshold)


def apply_adjustment(phase: PhaseMap, adj: PhaseAdjustment) -> PhaseMap:
    """Remap phases through the sample CDF so their distribution is uniform.

    The sorted sample is cut into ``bins`` equal-count bins; a pixel in bin i
    (ties at a shared edge go to the lower bin) maps to (i-1)/N plus its
    linear position within the bin scaled by 1/N. The map is continuous,
    monotone, and stays inside [0, 1).
    """
    edges = np.quantile(adj.quantiles, np.linspace(0.0, 1.0, adj.bins + 1))
    levels = np.linspace(0.0, 1.0, adj.bins + 1)
    # collapse duplicate edges, keeping the lowest level at each value
    keep = np.concatenate(([True], np.diff(edges) > 0))
    out = np.interp(phase.phase, edges[keep], levels[keep])
    out = np.minimum(out, np.nextafter(1.0, 0.0))
    return PhaseMap(np.where(phase.mask, out, np.nan), phase.mask)

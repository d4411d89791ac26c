"""Raster value types shared by every pipeline stage.

All types are immutable-after-construction containers around float64 numpy
arrays and are safe to share between threads. Intensities are real-valued;
quantization to integer codes happens only at file boundaries. Phase is
measured in cycles (1 cycle = 2*pi radians): wrapped phase lives in [0, 1),
unwrapped phase is unbounded. Masked-out pixels carry NaN as the sentinel
value and are ignored by all downstream statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RgbImage", "PhaseMap", "UnwrappedPhaseMap", "DepthMap"]


def _as_float2d(a: np.ndarray, name: str) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions")
    return a


def _as_mask(mask: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    mask = np.ascontiguousarray(mask, dtype=bool)
    if mask.shape != shape:
        raise ValueError(f"mask shape {mask.shape} does not match raster shape {shape}")
    return mask


@dataclass(frozen=True)
class RgbImage:
    """Three-channel intensity raster, shape (height, width, 3).

    Nominal range is [0, 1]; intermediate (pre-clamp) values may lie outside
    it. Operations that promise clamped output do the clamping themselves.
    """

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ValueError(f"RgbImage data must have shape (h, w, 3), got {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("RgbImage must have positive dimensions")
        if not np.isfinite(data).all():
            raise ValueError("RgbImage intensities must be finite")
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def brightness(self) -> np.ndarray:
        """Per-pixel brightness (C1 + C2 + C3) / 3."""
        return self.data.mean(axis=2)

    def clamped(self) -> "RgbImage":
        return RgbImage(np.clip(self.data, 0.0, 1.0))


@dataclass(frozen=True)
class PhaseMap:
    """Wrapped phase in [0, 1) cycles with a validity mask.

    ``phase`` is NaN wherever ``mask`` is False.
    """

    phase: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        phase = _as_float2d(self.phase, "phase")
        mask = _as_mask(self.mask, phase.shape)
        valid = phase[mask]
        if valid.size and (not np.isfinite(valid).all() or (valid < 0).any() or (valid >= 1).any()):
            raise ValueError("valid wrapped phase must lie in [0, 1)")
        phase = phase.copy()
        phase[~mask] = np.nan
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "mask", mask)

    @property
    def height(self) -> int:
        return self.phase.shape[0]

    @property
    def width(self) -> int:
        return self.phase.shape[1]


@dataclass(frozen=True)
class UnwrappedPhaseMap:
    """Real-valued unwrapped phase in cycles with a validity mask.

    ``regions`` counts the connected components that were unwrapped
    independently; offsets between distinct regions are arbitrary.
    """

    phase: np.ndarray
    mask: np.ndarray
    regions: int = 1

    def __post_init__(self):
        phase = _as_float2d(self.phase, "phase")
        mask = _as_mask(self.mask, phase.shape)
        valid = phase[mask]
        if valid.size and not np.isfinite(valid).all():
            raise ValueError("valid unwrapped phase must be finite")
        if self.regions < 1 and mask.any():
            raise ValueError("regions must be >= 1 when any pixel is valid")
        phase = phase.copy()
        phase[~mask] = np.nan
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "mask", mask)

    @property
    def height(self) -> int:
        return self.phase.shape[0]

    @property
    def width(self) -> int:
        return self.phase.shape[1]


@dataclass(frozen=True)
class DepthMap:
    """Per-pixel depth in scene length units with a validity mask."""

    depth: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        depth = _as_float2d(self.depth, "depth")
        mask = _as_mask(self.mask, depth.shape)
        valid = depth[mask]
        if valid.size and not np.isfinite(valid).all():
            raise ValueError("valid depths must be finite")
        depth = depth.copy()
        depth[~mask] = np.nan
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "mask", mask)

    @property
    def height(self) -> int:
        return self.depth.shape[0]

    @property
    def width(self) -> int:
        return self.depth.shape[1]

"""Three-phase color sinusoid pattern synthesis and its ground-truth phase.

The projected pattern carries one sinusoid per RGB channel, offset by
-2pi/3, 0, +2pi/3. Phase advances linearly along the stripe-normal axis,
so the per-pixel phase differential is constant: cycles / extent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import wrap_unit
from .types import PhaseMap, RgbImage

__all__ = ["PatternSpec", "ideal_phase", "synthesize_pattern", "CHANNEL_OFFSETS"]

HORIZONTAL = "horizontal"  # stripes run horizontally: phase varies along y
VERTICAL = "vertical"      # stripes run vertically: phase varies along x

# channel phase offsets in radians, order (C1, C2, C3) = (R, G, B)
CHANNEL_OFFSETS = np.array([-2.0 * np.pi / 3.0, 0.0, 2.0 * np.pi / 3.0])


@dataclass(frozen=True)
class PatternSpec:
    """Parameters of the projected sinusoid triple.

    ``mean_a`` and ``modulation_b`` are spatially constant; the defaults
    maximize modulation without clipping. ``cycles`` may be non-integer.
    """

    width: int = 640
    height: int = 480
    cycles: float = 40.0
    orientation: str = HORIZONTAL
    mean_a: float = 0.5
    modulation_b: float = 0.5

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("pattern dimensions must be positive")
        if self.orientation not in (HORIZONTAL, VERTICAL):
            raise ValueError(f"orientation must be '{HORIZONTAL}' or '{VERTICAL}'")
        if self.modulation_b <= 0:
            raise ValueError("modulation_b must be > 0")
        if self.mean_a - self.modulation_b < 0 or self.mean_a + self.modulation_b > 1:
            raise ValueError("pattern requires a - b >= 0 and a + b <= 1")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")

    @property
    def extent(self) -> int:
        """Length of the stripe-normal axis in pixels."""
        return self.height if self.orientation == HORIZONTAL else self.width

    @property
    def phase_step(self) -> float:
        """Constant per-pixel phase differential along the stripe-normal axis."""
        return self.cycles / self.extent


def unwrapped_ramp(spec: PatternSpec) -> np.ndarray:
    """Continuous (unwrapped) pattern phase in cycles, shape (h, w)."""
    if spec.orientation == HORIZONTAL:
        axis = spec.cycles * np.arange(spec.height, dtype=np.float64) / spec.height
        return np.broadcast_to(axis[:, None], (spec.height, spec.width)).copy()
    axis = spec.cycles * np.arange(spec.width, dtype=np.float64) / spec.width
    return np.broadcast_to(axis[None, :], (spec.height, spec.width)).copy()


def ideal_phase(spec: PatternSpec) -> PhaseMap:
    """Ground-truth wrapped phase of the pattern; every pixel is valid."""
    phase = wrap_unit(unwrapped_ramp(spec))
    return PhaseMap(phase, np.ones((spec.height, spec.width), dtype=bool))


def synthesize_pattern(spec: PatternSpec) -> RgbImage:
    """Render the three-channel sinusoid pattern; values lie in [a-b, a+b]."""
    phi = ideal_phase(spec).phase
    angles = 2.0 * np.pi * phi[:, :, None] + CHANNEL_OFFSETS
    return RgbImage(spec.mean_a + spec.modulation_b * np.cos(angles))

"""Phase unwrapping: recover the integer period index per pixel.

``initial_unwrap`` grows from a bright seed near the image center through a
best-first frontier: the brightest candidate pixel is unwrapped next against
the neighbor that queued it, with ties preferring the low-gradient axis and
then row-major order. Each pixel is assigned exactly once, so a wrong pixel
cannot be revisited; disconnected valid regions restart from fresh seeds and
keep independent integer offsets.

``correct_phase`` then repairs isolated period errors with an in-place
window filter: sweeping center-out (low-gradient axis first), each pixel is
shifted by the rounded difference between its window mean and itself, where
the mean sees already-corrected values for visited pixels. The sweep order
is part of the contract; both operations are deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import cv2
import numpy as np

from .types import PhaseMap, UnwrappedPhaseMap

__all__ = ["UnwrapConfig", "UnwrapError", "initial_unwrap", "correct_phase"]

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


class UnwrapError(ValueError):
    """No valid pixel qualifies for unwrapping."""


@dataclass(frozen=True)
class UnwrapConfig:
    """Unwrapping parameters.

    ``orientation`` names the stripe direction of the pattern, which fixes
    the low-gradient axis: horizontal stripes vary along y, so phase is
    smoothest along x, and vice versa.
    """

    intensity_threshold: float = 0.1
    correction_window: int = 11
    orientation: str = HORIZONTAL
    max_seed_restarts: int = 64

    def __post_init__(self):
        if not 0.0 <= self.intensity_threshold <= 1.0:
            raise ValueError("intensity_threshold must lie in [0, 1]")
        if self.correction_window < 3 or self.correction_window % 2 == 0:
            raise ValueError("correction_window must be odd and >= 3")
        if self.orientation not in (HORIZONTAL, VERTICAL):
            raise ValueError(f"orientation must be '{HORIZONTAL}' or '{VERTICAL}'")
        if self.max_seed_restarts < 0:
            raise ValueError("max_seed_restarts must be >= 0")


def _brightest(candidates: np.ndarray, intensity: np.ndarray) -> int:
    """Flat index of the brightest candidate; row-major order breaks ties."""
    masked = np.where(candidates, intensity, -np.inf)
    return int(masked.argmax())


def _pick_seed(qualify: np.ndarray, intensity: np.ndarray) -> int:
    """Brightest qualifying pixel within the middle ninth of the image,
    falling back to the whole frame if that window is empty."""
    h, w = qualify.shape
    r0, r1 = h // 3, h - h // 3
    c0, c1 = w // 3, w - w // 3
    window = np.zeros_like(qualify)
    window[r0:r1, c0:c1] = True
    center_candidates = qualify & window
    if center_candidates.any():
        return _brightest(center_candidates, intensity)
    return _brightest(qualify, intensity)


def initial_unwrap(
    phase: PhaseMap, intensity: np.ndarray, cfg: UnwrapConfig
) -> UnwrappedPhaseMap:
    """Assign period indices by best-first propagation from a central seed."""
    h, w = phase.height, phase.width
    intensity = np.asarray(intensity, dtype=np.float64)
    if intensity.shape != (h, w):
        raise ValueError("intensity raster shape does not match phase map")
    qualify = phase.mask & (intensity >= cfg.intensity_threshold)
    if not qualify.any():
        raise UnwrapError("no valid pixels above the intensity threshold")

    npix = h * w
    idx_bits = npix.bit_length()
    key_shift = idx_bits + 1
    # nonnegative float bit patterns sort like the values; invert for max-first
    inten_bits = np.maximum(intensity, 0.0).ravel().view(np.uint64)
    inv_bits = (np.uint64(0xFFFFFFFFFFFFFFFF) - inten_bits).tolist()
    phase_flat = phase.phase.ravel().tolist()
    qualify_flat = qualify.ravel().tolist()
    # when p was queued along the low-gradient axis it outranks equal-intensity
    # entries queued along the high-gradient axis
    if cfg.orientation == HORIZONTAL:
        neighbor_steps = ((-w, 1), (w, 1), (-1, 0), (1, 0))
    else:
        neighbor_steps = ((-w, 0), (w, 0), (-1, 1), (1, 1))

    out = [0.0] * npix
    assigned = bytearray(npix)
    heap: list[tuple[int, int, int]] = []
    push = heapq.heappush
    pop = heapq.heappop

    def enqueue_neighbors(q: int) -> None:
        row = q // w
        for step, axis in neighbor_steps:
            p = q + step
            if step == -1 and p // w != row:
                continue
            if step == 1 and p // w != row:
                continue
            if p < 0 or p >= npix or assigned[p] or not qualify_flat[p]:
                continue
            push(heap, ((inv_bits[p] << key_shift) | (axis << idx_bits) | p, p, q))

    def start_region(seed: int) -> None:
        out[seed] = phase_flat[seed]
        assigned[seed] = 1
        enqueue_neighbors(seed)

    regions = 0
    restarts = 0
    remaining = int(qualify.sum())
    seed = _pick_seed(qualify, intensity)
    start_region(seed)
    regions += 1
    remaining -= 1

    while True:
        while heap:
            _, p, q = pop(heap)
            if assigned[p]:
                continue
            fp = phase_flat[p]
            out[p] = fp + round(out[q] - fp)
            assigned[p] = 1
            remaining -= 1
            enqueue_neighbors(p)
        if remaining <= 0 or restarts >= cfg.max_seed_restarts:
            break
        # disconnected region left: restart from the brightest unassigned
        # qualifying pixel, preferring one that touches assigned ground
        assigned_arr = np.frombuffer(bytes(assigned), dtype=np.uint8).reshape(h, w).astype(bool)
        unassigned = qualify & ~assigned_arr
        touching = np.zeros_like(assigned_arr)
        touching[1:, :] |= assigned_arr[:-1, :]
        touching[:-1, :] |= assigned_arr[1:, :]
        touching[:, 1:] |= assigned_arr[:, :-1]
        touching[:, :-1] |= assigned_arr[:, 1:]
        candidates = unassigned & touching
        if not candidates.any():
            candidates = unassigned
        seed = _brightest(candidates, intensity)
        start_region(seed)
        regions += 1
        restarts += 1
        remaining -= 1

    mask = np.frombuffer(bytes(assigned), dtype=np.uint8).reshape(h, w).astype(bool)
    result = np.asarray(out, dtype=np.float64).reshape(h, w)
    return UnwrappedPhaseMap(np.where(mask, result, np.nan), mask, regions=regions)


def _box_sums(values: np.ndarray, window: int) -> np.ndarray:
    return cv2.boxFilter(
        values, -1, (window, window), normalize=False, borderType=cv2.BORDER_CONSTANT
    )


def _sweep_columns(width: int) -> list[int]:
    center = width // 2
    return list(range(center, -1, -1)) + list(range(center + 1, width))


def _sweep_rows(height: int) -> list[int]:
    center = height // 2
    return [center] + list(range(center - 1, -1, -1)) + list(range(center + 1, height))


def _correct_rows(phase: np.ndarray, mask: np.ndarray, window: int) -> np.ndarray:
    """Center-out in-place correction sweep over a row-major field.

    The running field equals the original plus the integer corrections
    applied so far, so each window mean is evaluated lazily as
    (original window sum + correction sum in window) / valid count.
    """
    h, w = phase.shape
    half = window // 2
    filled = np.where(mask, phase, 0.0)
    sums = _box_sums(filled, window)
    counts = _box_sums(mask.astype(np.float64), window)

    corrections = np.zeros((h, w))
    row_has_correction = [0] * h
    sums_l = sums.ravel().tolist()
    counts_l = counts.ravel().tolist()
    phase_l = phase.ravel().tolist()
    mask_l = mask.ravel().tolist()

    cols = _sweep_columns(w)
    for r in _sweep_rows(h):
        r0 = r - half if r >= half else 0
        r1 = r + half + 1
        base = r * w
        for c in cols:
            i = base + c
            if not mask_l[i]:
                continue
            total = sums_l[i]
            if any(row_has_correction[r0:r1]):
                c0 = c - half if c >= half else 0
                total += corrections[r0:r1, c0 : c + half + 1].sum()
            delta = round(total / counts_l[i] - phase_l[i])
            if delta:
                corrections[r, c] = delta
                row_has_correction[r] += 1
    return phase + corrections


def correct_phase(u: UnwrappedPhaseMap, cfg: UnwrapConfig) -> UnwrappedPhaseMap:
    """Repair period errors with the sequential window correction filter.

    Processing starts at the image center and proceeds along the
    low-gradient axis first (toward lower indices, then higher), then row by
    row outward, each line swept center-out; corrections made earlier in the
    sweep feed the window means of later pixels.
    """
    if not u.mask.any():
        return u
    if cfg.orientation == HORIZONTAL:
        corrected = _correct_rows(np.nan_to_num(u.phase, nan=0.0), u.mask, cfg.correction_window)
    else:
        corrected = _correct_rows(
            np.nan_to_num(u.phase, nan=0.0).T.copy(),
            u.mask.T.copy(),
            cfg.correction_window,
        ).T
    return UnwrappedPhaseMap(
        np.where(u.mask, corrected, np.nan), u.mask, regions=u.regions
    )

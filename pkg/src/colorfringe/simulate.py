"""Forward model of the projector-scene-camera chain.

``reflect`` renders the pattern off a scene: surface height shifts the
observed phase linearly (kappa cycles per depth unit) and per-channel albedo
scales the intensities. ``apply_camera`` then distorts the reflected image
the way a real projector-camera pair would: 3x3 color crosstalk, per-channel
offset, monotone response curve, and seeded additive Gaussian noise, in that
order, with a final clamp to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import wrap_unit
from .pattern import CHANNEL_OFFSETS, PatternSpec, unwrapped_ramp
from .types import DepthMap, RgbImage

__all__ = [
    "CameraModel",
    "SceneModel",
    "identity_camera",
    "default_distortion",
    "reflect",
    "true_unwrapped_phase",
    "apply_camera",
    "calibration_captures",
]

MAX_CONDITION = 1e6

# Test preset chosen to qualitatively match a dominant-diagonal response with
# visible cross-channel leakage; not measured data.
DEFAULT_CROSSTALK = np.array(
    [
        [0.90, 0.08, 0.02],
        [0.10, 0.80, 0.10],
        [0.03, 0.12, 0.85],
    ]
)
DEFAULT_OFFSET = np.array([0.02, 0.02, 0.02])
DEFAULT_GAMMA = (2.2, 2.2, 2.2)


@dataclass(frozen=True)
class CameraModel:
    """Projector-to-camera distortion model.

    ``crosstalk`` row i holds camera channel i's weights over the projector
    channels. The response is either a per-channel gamma exponent or a
    sampled monotone curve ``(x_samples, y_samples)`` per channel with
    y[0] == 0; exactly one of the two must be given.
    """

    crosstalk: np.ndarray = field(default_factory=lambda: np.eye(3))
    offset: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gamma: tuple[float, float, float] | None = (1.0, 1.0, 1.0)
    response_curves: tuple[tuple[np.ndarray, np.ndarray], ...] | None = None
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        m = np.ascontiguousarray(self.crosstalk, dtype=np.float64)
        if m.shape != (3, 3):
            raise ValueError(f"crosstalk must be 3x3, got {m.shape}")
        if np.linalg.cond(m) > MAX_CONDITION:
            raise ValueError("crosstalk matrix is singular or badly conditioned")
        off = np.ascontiguousarray(self.offset, dtype=np.float64)
        if off.shape != (3,):
            raise ValueError(f"offset must be a 3-vector, got shape {off.shape}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if (self.gamma is None) == (self.response_curves is None):
            raise ValueError("specify exactly one of gamma or response_curves")
        if self.gamma is not None:
            g = tuple(float(v) for v in self.gamma)
            if len(g) != 3 or any(v <= 0 for v in g):
                raise ValueError("gamma must be three positive exponents")
            object.__setattr__(self, "gamma", g)
        else:
            curves = []
            for xs, ys in self.response_curves:
                xs = np.ascontiguousarray(xs, dtype=np.float64)
                ys = np.ascontiguousarray(ys, dtype=np.float64)
                if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
                    raise ValueError("response curve needs matching 1-D samples")
                if (np.diff(xs) <= 0).any():
                    raise ValueError("response curve x samples must be increasing")
                if (np.diff(ys) < 0).any() or ys[-1] <= ys[0]:
                    raise ValueError("response curve must be monotone nondecreasing")
                if ys[0] != 0.0:
                    raise ValueError("response curve must satisfy response(0) = 0")
                curves.append((xs, ys))
            if len(curves) != 3:
                raise ValueError("response_curves must provide one curve per channel")
            object.__setattr__(self, "response_curves", tuple(curves))
        object.__setattr__(self, "crosstalk", m)
        object.__setattr__(self, "offset", off)

    def response(self, v: np.ndarray) -> np.ndarray:
        """Apply the per-channel response to values already in [0, 1]."""
        out = np.empty_like(v)
        for i in range(3):
            if self.gamma is not None:
                out[:, :, i] = np.power(v[:, :, i], self.gamma[i])
            else:
                xs, ys = self.response_curves[i]
                out[:, :, i] = np.interp(v[:, :, i], xs, ys)
        return out


def identity_camera(noise_sigma: float = 0.0, seed: int = 0) -> CameraModel:
    return CameraModel(noise_sigma=noise_sigma, seed=seed)


def default_distortion(noise_sigma: float = 0.0, seed: int = 0) -> CameraModel:
    """The gamma-2.2 + crosstalk test preset."""
    return CameraModel(
        crosstalk=DEFAULT_CROSSTALK.copy(),
        offset=DEFAULT_OFFSET.copy(),
        gamma=DEFAULT_GAMMA,
        noise_sigma=noise_sigma,
        seed=seed,
    )


@dataclass(frozen=True)
class SceneModel:
    """Surface under the projector: depth field, per-channel albedo, and the
    linear depth-to-phase gain kappa (cycles per depth unit)."""

    depth: DepthMap
    albedo: np.ndarray
    kappa: float
    reference_depth: float = 0.0

    def __post_init__(self):
        albedo = np.ascontiguousarray(self.albedo, dtype=np.float64)
        if albedo.shape != (self.depth.height, self.depth.width, 3):
            raise ValueError(
                f"albedo shape {albedo.shape} does not match depth "
                f"({self.depth.height}, {self.depth.width}, 3)"
            )
        if (albedo < 0).any() or (albedo > 1).any():
            raise ValueError("albedo must lie in [0, 1]")
        if self.kappa == 0:
            raise ValueError("kappa must be nonzero")
        object.__setattr__(self, "albedo", albedo)

    @property
    def height(self) -> int:
        return self.depth.height

    @property
    def width(self) -> int:
        return self.depth.width


def _check_dims(spec: PatternSpec, scene: SceneModel) -> None:
    if (scene.height, scene.width) != (spec.height, spec.width):
        raise ValueError(
            f"scene is {scene.height}x{scene.width} but pattern is "
            f"{spec.height}x{spec.width}"
        )


def true_unwrapped_phase(spec: PatternSpec, scene: SceneModel) -> np.ndarray:
    """Ground-truth continuous phase in cycles: pattern ramp + kappa * dz.

    NaN where the scene depth is masked.
    """
    _check_dims(spec, scene)
    return unwrapped_ramp(spec) + scene.kappa * (scene.depth.depth - scene.reference_depth)


def reflect(spec: PatternSpec, scene: SceneModel) -> RgbImage:
    """Render the pattern reflected off the scene (no camera distortion)."""
    phi = wrap_unit(np.nan_to_num(true_unwrapped_phase(spec, scene), nan=0.0))
    angles = 2.0 * np.pi * phi[:, :, None] + CHANNEL_OFFSETS
    data = scene.albedo * (spec.mean_a + spec.modulation_b * np.cos(angles))
    data[~scene.depth.mask] = 0.0
    return RgbImage(data)


def apply_camera(image: RgbImage, cam: CameraModel) -> RgbImage:
    """Distort an image through the camera chain.

    Per pixel: v = M*C + offset; w = response(clamp(v, 0, 1)); additive
    Gaussian noise drawn row-major, channel-minor from a generator seeded by
    ``cam.seed``; final clamp to [0, 1]. Equal seeds give equal outputs.
    """
    v = image.data @ cam.crosstalk.T + cam.offset
    w = cam.response(np.clip(v, 0.0, 1.0))
    if cam.noise_sigma > 0:
        rng = np.random.default_rng(cam.seed)
        w = w + cam.noise_sigma * rng.standard_normal(w.shape)
    return RgbImage(np.clip(w, 0.0, 1.0))


def ramp_image(width: int, height: int, channel: int) -> RgbImage:
    """Single-channel calibration ramp: channel value is x/(w-1), others 0."""
    data = np.zeros((height, width, 3))
    data[:, :, channel] = np.linspace(0.0, 1.0, width)[None, :]
    return RgbImage(data)


def calibration_captures(
    cam: CameraModel, size: tuple[int, int] = (640, 480)
) -> tuple[RgbImage, RgbImage, RgbImage]:
    """Capture one linear ramp per projector channel through the camera.

    Column x of capture k holds the camera's response to projector input
    t = x/(w-1) on channel k with the other channels dark, reproducing the
    per-channel response curve families as image columns.
    """
    width, height = size
    return tuple(
        apply_camera(ramp_image(width, height, k), cam) for k in range(3)
    )

import numpy as np
import pytest

from colorfringe.numerics import circular_difference, wrap_unit
from colorfringe.pattern import PatternSpec, ideal_phase
from colorfringe.recover import (
    AdjustmentError,
    EstimationError,
    PhaseAdjustment,
    apply_adjustment,
    build_adjustment,
    compensate_crosstalk,
    estimate_crosstalk,
    local_color_balance,
    wrapped_phase,
)
from colorfringe.scenes import flat_scene, uniform_albedo
from colorfringe.simulate import (
    CameraModel,
    apply_camera,
    calibration_captures,
    default_distortion,
    identity_camera,
    reflect,
)
from colorfringe.types import PhaseMap, RgbImage


def _triple(c1, c2, c3):
    return RgbImage(np.array([[[c1, c2, c3]]], dtype=float))


# ---------------------------------------------------------------------------
# crosstalk estimation and compensation
# ---------------------------------------------------------------------------


def test_estimate_identity_camera_exact():
    caps = calibration_captures(identity_camera(), size=(160, 8))
    m, beta = estimate_crosstalk(caps)
    assert np.abs(m - np.eye(3)).max() < 1e-9
    assert np.abs(beta).max() < 1e-9


def test_estimate_known_matrix_linear_noiseless():
    preset = default_distortion()
    cam = CameraModel(crosstalk=preset.crosstalk, offset=preset.offset, gamma=(1.0, 1.0, 1.0))
    m, beta = estimate_crosstalk(calibration_captures(cam, size=(320, 16)))
    assert np.abs(m - preset.crosstalk).max() < 1e-9
    assert np.abs(beta - preset.offset).max() < 1e-9


def test_estimate_known_matrix_with_noise():
    preset = default_distortion()
    cam = CameraModel(
        crosstalk=preset.crosstalk, offset=preset.offset,
        gamma=(1.0, 1.0, 1.0), noise_sigma=0.002, seed=42,
    )
    m, beta = estimate_crosstalk(calibration_captures(cam, size=(640, 480)))
    assert np.abs(m - preset.crosstalk).max() < 1e-3


def test_estimate_constant_captures_unfittable():
    flat = RgbImage(np.full((8, 8, 3), 0.3))
    with pytest.raises(EstimationError):
        estimate_crosstalk((flat, flat, flat))


def test_compensate_identity_is_identity(rng):
    img = RgbImage(rng.random((5, 6, 3)))
    out = compensate_crosstalk(img, np.eye(3), np.zeros(3))
    np.testing.assert_allclose(out.data, img.data, atol=1e-15)


def test_compensate_inverts_linear_camera(rng):
    # oracle: applying M, beta then the explicit numpy inverse must return
    # the original image
    img = RgbImage(rng.random((6, 7, 3)) * 0.6)
    preset = default_distortion()
    cam = CameraModel(crosstalk=preset.crosstalk, offset=preset.offset, gamma=(1.0, 1.0, 1.0))
    distorted = apply_camera(img, cam)
    recovered = compensate_crosstalk(distorted, cam.crosstalk, cam.offset)
    np.testing.assert_allclose(recovered.data, img.data, atol=1e-9)
    oracle = (distorted.data - cam.offset) @ np.linalg.inv(cam.crosstalk).T
    np.testing.assert_allclose(recovered.data, oracle, atol=1e-12)


def test_compensate_scalar_inverse():
    out = compensate_crosstalk(_triple(0.5, 0.5, 0.5), 2.0 * np.eye(3), np.zeros(3))
    np.testing.assert_allclose(out.data, 0.25, atol=1e-15)


def test_compensate_singular_matrix_raises(rng):
    img = RgbImage(rng.random((2, 2, 3)))
    with pytest.raises(ValueError):
        compensate_crosstalk(img, np.ones((3, 3)), np.zeros(3))


# ---------------------------------------------------------------------------
# local color balance
# ---------------------------------------------------------------------------


def test_balance_constant_image_gives_ones():
    img = RgbImage(np.full((9, 9, 3), 0.37))
    balanced, valid = local_color_balance(img, 5)
    assert valid.all()
    np.testing.assert_allclose(balanced.data, 1.0, atol=1e-12)


def test_balance_window_validation(rng):
    img = RgbImage(rng.random((5, 5, 3)))
    with pytest.raises(ValueError):
        local_color_balance(img, 4)
    with pytest.raises(ValueError):
        local_color_balance(img, 1)


def test_balance_zero_region_masked():
    data = np.full((9, 9, 3), 0.5)
    data[:, :5, :] = 0.0  # left half dark: windows there average to ~0
    balanced, valid = local_color_balance(RgbImage(data), 3)
    assert not valid[4, 0]
    assert valid[4, 8]
    assert (balanced.data[~valid] == 0.0).all()


def test_balance_cancels_constant_albedo_one_cycle_window():
    # window spans exactly one cycle (13 px) so each channel's window mean is
    # rho_i * a exactly and the albedo cancels
    spec = PatternSpec(width=60, height=130, cycles=10.0)  # 13 px per cycle
    scene = flat_scene(
        spec.width, spec.height,
        albedo=uniform_albedo(spec.width, spec.height, (0.9, 0.6, 0.3)),
    )
    capture = reflect(spec, scene)
    balanced, valid = local_color_balance(capture, 13)
    pm = wrapped_phase(balanced, mask=valid)
    truth = ideal_phase(spec)
    margin = 13 // 2
    interior = np.zeros(pm.mask.shape, bool)
    interior[margin:-margin, margin:-margin] = True
    sel = pm.mask & interior
    err = np.abs(circular_difference(pm.phase, truth.phase))[sel]
    assert err.max() < 1e-3


# ---------------------------------------------------------------------------
# wrapped phase
# ---------------------------------------------------------------------------


def test_wrapped_phase_zero():
    pm = wrapped_phase(_triple(0.25, 1.0, 0.25))
    assert pm.mask[0, 0]
    assert pm.phase[0, 0] == pytest.approx(0.0, abs=1e-15)


def test_wrapped_phase_one_third():
    # derived by forward-evaluating the synthesis equations at phi = 2pi/3,
    # a = 0.5, b = 0.4 and inverting
    pm = wrapped_phase(_triple(0.9, 0.3, 0.3))
    assert pm.phase[0, 0] == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_wrapped_phase_degenerate_masked():
    for v in (0.0, 0.4, 1.0):
        pm = wrapped_phase(_triple(v, v, v))
        assert not pm.mask[0, 0]
        assert np.isnan(pm.phase[0, 0])


def test_wrapped_phase_roundtrip_dense_grid():
    phis = np.linspace(0.0, 1.0, 10001)[:-1]
    for a, b in ((0.5, 0.5), (0.5, 0.3), (0.6, 0.25)):
        angles = 2.0 * np.pi * phis[None, :, None] + np.array([-2 * np.pi / 3, 0.0, 2 * np.pi / 3])
        img = RgbImage(a + b * np.cos(angles))
        pm = wrapped_phase(img)
        assert pm.mask.all()
        err = np.abs(circular_difference(pm.phase[0], phis))
        assert err.max() < 1e-9


def test_wrapped_phase_affine_invariance(rng):
    c = rng.random((40, 25, 3))
    base = wrapped_phase(RgbImage(c))
    for _ in range(20):
        alpha = 10.0 ** rng.uniform(-1, 1)
        beta = rng.uniform(-0.5, 0.5)
        pm = wrapped_phase(RgbImage(alpha * c + beta))
        d = circular_difference(pm.phase, base.phase)[base.mask & pm.mask]
        assert np.abs(d).max() < 1e-12


def test_wrapped_phase_respects_prior_mask(rng):
    img = RgbImage(rng.random((4, 4, 3)))
    prior = np.zeros((4, 4), bool)
    prior[0, 0] = True
    pm = wrapped_phase(img, mask=prior)
    assert pm.mask.sum() <= 1


# ---------------------------------------------------------------------------
# distribution adjustment
# ---------------------------------------------------------------------------


def _phase_map_from(values):
    values = np.asarray(values, dtype=float)
    return PhaseMap(values, np.ones(values.shape, bool))


def test_build_adjustment_all_below_threshold():
    pm = _phase_map_from(np.linspace(0, 0.9, 64).reshape(8, 8))
    dark = np.zeros((8, 8))
    with pytest.raises(AdjustmentError):
        build_adjustment(pm, dark, threshold=0.5, bins=4, sample_target=16)


def test_build_adjustment_sorts_samples():
    pm = _phase_map_from(np.array([[0.2, 0.9], [0.0, 0.1]]))
    bright = np.ones((2, 2))
    adj = build_adjustment(pm, bright, threshold=0.5, bins=4, sample_target=4)
    np.testing.assert_allclose(adj.quantiles, [0.0, 0.1, 0.2, 0.9])


def test_build_adjustment_uniform_ramp_order_statistics():
    # oracle: quantiles of an evenly spaced grid are approximately i/M
    n = 400
    pm = _phase_map_from((np.arange(n, dtype=float) / n).reshape(20, 20))
    adj = build_adjustment(pm, np.ones((20, 20)), threshold=0.0, bins=8, sample_target=n)
    m = adj.quantiles.size
    expected = np.arange(m) / m
    assert np.abs(adj.quantiles - expected).max() <= 1.0 / m + 1e-12


def test_build_adjustment_stride_subsampling_deterministic():
    n = 1000
    values = wrap_unit(np.linspace(0, 1, n, endpoint=False) ** 2).reshape(25, 40)
    pm = _phase_map_from(values)
    a = build_adjustment(pm, np.ones((25, 40)), threshold=0.0, bins=16, sample_target=100)
    b = build_adjustment(pm, np.ones((25, 40)), threshold=0.0, bins=16, sample_target=100)
    np.testing.assert_array_equal(a.quantiles, b.quantiles)
    assert 100 <= a.quantiles.size <= 200  # ~sample_target with stride flooring


def test_adjustment_validation():
    with pytest.raises(ValueError):
        PhaseAdjustment(np.array([0.2, 0.1, 0.3, 0.4]), bins=2, threshold=0.1)
    with pytest.raises(ValueError):
        PhaseAdjustment(np.array([0.1, 0.2]), bins=4, threshold=0.1)
    with pytest.raises(ValueError):
        PhaseAdjustment(np.array([0.1, 0.2, 0.5, 1.0]), bins=2, threshold=0.1)


def test_apply_adjustment_uniform_is_near_identity():
    n, bins = 4096, 64
    values = (np.arange(n, dtype=float) / n).reshape(64, 64)
    pm = _phase_map_from(values)
    adj = build_adjustment(pm, np.ones((64, 64)), threshold=0.0, bins=bins, sample_target=n)
    out = apply_adjustment(pm, adj)
    assert np.abs(out.phase - values).max() <= 1.0 / bins + 1e-12


def test_apply_adjustment_median_maps_to_half():
    # gamma-compressed ramp concentrated in [0, 0.5]
    n, bins = 2000, 50
    values = 0.5 * (np.arange(n, dtype=float) / n) ** 2
    pm = _phase_map_from(values.reshape(40, 50))
    adj = build_adjustment(pm, np.ones((40, 50)), threshold=0.0, bins=bins, sample_target=n)
    median = np.median(adj.quantiles)
    out = apply_adjustment(_phase_map_from(np.array([[median]])), adj)
    assert out.phase[0, 0] == pytest.approx(0.5, abs=1.0 / bins)


def test_apply_adjustment_monotone(rng):
    samples = np.sort(rng.random(500) ** 1.7)
    adj = PhaseAdjustment(samples, bins=32, threshold=0.0)
    xs = np.sort(rng.random(300))
    out = apply_adjustment(_phase_map_from(xs.reshape(1, -1)), adj).phase[0]
    assert (np.diff(out) >= -1e-15).all()


def test_apply_adjustment_fills_bins_evenly(rng):
    # on its own build samples the map fills each of the N bins with counts
    # within +-1 of M/N
    n, bins = 5000, 25
    samples = np.sort(rng.random(n) ** 2.2)
    adj = PhaseAdjustment(samples, bins=bins, threshold=0.0)
    out = apply_adjustment(_phase_map_from(samples.reshape(50, 100)), adj).phase.ravel()
    counts, _ = np.histogram(out, bins=bins, range=(0.0, 1.0))
    assert np.abs(counts - n / bins).max() <= 1.0 + 1e-9


def test_apply_adjustment_output_stays_in_unit_interval(rng):
    samples = np.sort(rng.random(256))
    adj = PhaseAdjustment(samples, bins=16, threshold=0.0)
    xs = np.concatenate([[0.0], rng.random(100), [samples.max(), 0.999999]])
    out = apply_adjustment(_phase_map_from(xs.reshape(1, -1)), adj).phase[0]
    assert (out >= 0.0).all() and (out < 1.0).all()


def test_apply_adjustment_preserves_mask():
    values = np.array([[0.1, 0.5], [0.9, 0.3]])
    mask = np.array([[True, False], [True, True]])
    pm = PhaseMap(values, mask)
    adj = PhaseAdjustment(np.sort(np.random.default_rng(0).random(64)), bins=8, threshold=0.0)
    out = apply_adjustment(pm, adj)
    assert (out.mask == mask).all()
    assert np.isnan(out.phase[0, 1])

import numpy as np
import pytest

from colorfringe.pattern import PatternSpec
from colorfringe.reconstruct import mean_smooth, phase_to_depth, remove_carrier, threshold_mask
from colorfringe.types import DepthMap, RgbImage, UnwrappedPhaseMap


def test_threshold_zero_keeps_everything(rng):
    img = RgbImage(rng.random((6, 6, 3)))
    assert threshold_mask(img, 0.0).all()


def test_threshold_one_keeps_only_saturated():
    data = np.zeros((2, 2, 3))
    data[0, 0] = 1.0
    mask = threshold_mask(RgbImage(data), 1.0)
    assert mask[0, 0] and mask.sum() == 1


def test_threshold_rejects_out_of_range_tau(rng):
    img = RgbImage(rng.random((2, 2, 3)))
    with pytest.raises(ValueError):
        threshold_mask(img, 1.5)


def test_threshold_pattern_brightness_constant():
    # the three channel sinusoids sum to 3a, so brightness is a everywhere
    from colorfringe.pattern import synthesize_pattern

    img = synthesize_pattern(PatternSpec(width=24, height=24, cycles=2.0))
    assert threshold_mask(img, 0.4).all()


def test_threshold_monotone_in_tau(rng):
    img = RgbImage(rng.random((10, 10, 3)))
    previous = threshold_mask(img, 0.0)
    for tau in (0.2, 0.4, 0.6, 0.8, 1.0):
        current = threshold_mask(img, tau)
        assert (current <= previous).all()
        previous = current


def test_phase_to_depth_reference_maps_to_reference():
    u = UnwrappedPhaseMap(np.full((3, 3), 2.5), np.ones((3, 3), bool))
    d = phase_to_depth(u, kappa=0.5, reference_depth=7.0, reference_phase=2.5)
    np.testing.assert_allclose(d.depth, 7.0)


def test_phase_to_depth_linear_inverse():
    u = UnwrappedPhaseMap(np.full((2, 2), 1.0), np.ones((2, 2), bool))
    d = phase_to_depth(u, kappa=0.5)
    np.testing.assert_allclose(d.depth, 2.0)


def test_phase_to_depth_rejects_zero_kappa():
    u = UnwrappedPhaseMap(np.zeros((2, 2)), np.ones((2, 2), bool))
    with pytest.raises(ValueError):
        phase_to_depth(u, kappa=0.0)


def test_remove_carrier_leaves_pure_shift():
    spec = PatternSpec(width=4, height=24, cycles=2.0)
    kappa_dz = 0.75
    ramp = spec.cycles * np.arange(24, dtype=float)[:, None] / 24
    u = UnwrappedPhaseMap(
        np.broadcast_to(ramp, (24, 4)).copy() + kappa_dz, np.ones((24, 4), bool)
    )
    shift = remove_carrier(u, spec)
    np.testing.assert_allclose(shift.phase, kappa_dz, atol=1e-12)


def test_mean_smooth_window_one_is_identity(rng):
    d = DepthMap(rng.random((5, 5)), np.ones((5, 5), bool))
    out = mean_smooth(d, 1)
    np.testing.assert_array_equal(out.depth, d.depth)


def test_mean_smooth_constant_unchanged():
    d = DepthMap(np.full((7, 7), 4.2), np.ones((7, 7), bool))
    out = mean_smooth(d, 3)
    np.testing.assert_allclose(out.depth, 4.2, atol=1e-12)


def test_mean_smooth_1d_example():
    # direct window means: [0,0,3,0,0] window 3 -> [0,1,1,1,0]
    d = DepthMap(np.array([[0.0, 0.0, 3.0, 0.0, 0.0]]), np.ones((1, 5), bool))
    out = mean_smooth(d, 3)
    np.testing.assert_allclose(out.depth, [[0.0, 1.0, 1.0, 1.0, 0.0]], atol=1e-12)


def test_mean_smooth_matches_brute_force_oracle(rng):
    h, w, window = 9, 11, 5
    half = window // 2
    values = rng.random((h, w)) * 10
    mask = rng.random((h, w)) > 0.25
    d = DepthMap(values, mask)
    out = mean_smooth(d, window)
    for r in range(h):
        for c in range(w):
            if not mask[r, c]:
                assert np.isnan(out.depth[r, c])
                continue
            r0, r1 = max(0, r - half), min(h, r + half + 1)
            c0, c1 = max(0, c - half), min(w, c + half + 1)
            wnd_mask = mask[r0:r1, c0:c1]
            expected = values[r0:r1, c0:c1][wnd_mask].mean()
            assert out.depth[r, c] == pytest.approx(expected, abs=1e-12)


def test_mean_smooth_rejects_even_window(rng):
    d = DepthMap(rng.random((4, 4)), np.ones((4, 4), bool))
    with pytest.raises(ValueError):
        mean_smooth(d, 2)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from v2vbeam import (
    Beamformer,
    LinkBudget,
    ChannelMatrix,
    beamformer_for_angle,
    best_rx_beam,
    codebook_depth,
    pathloss_los,
    snr_db,
    spectral_efficiency,
    svd_oracle,
    uniform_codebook,
)
from v2vbeam.beamforming import load_codebook, save_codebook

from util import BUDGET, CODEBOOK64, GEOM, multipath_channel, rank1_channel

TWO_PI = 2 * math.pi

angle_st = st.floats(min_value=0.0, max_value=TWO_PI - 1e-9)


# ---------- beamformers ----------

@given(angle_st)
@settings(max_examples=100)
def test_beamformer_unit_norm(az):
    f = beamformer_for_angle(GEOM, az)
    assert np.linalg.norm(f.weights) == pytest.approx(1.0, abs=1e-12)


def test_beamformer_rejects_unnormalized():
    with pytest.raises(ValueError):
        Beamformer(np.ones(64, dtype=complex))


def test_same_angle_same_weights():
    a = beamformer_for_angle(GEOM, 1.234)
    b = beamformer_for_angle(GEOM, 1.234)
    np.testing.assert_array_equal(a.weights, b.weights)


def test_matched_beamformers_reach_rank1_gain():
    alpha = 3.7e-4
    H = rank1_channel(0.9, 2.2, alpha)
    f = beamformer_for_angle(GEOM, 0.9)
    w = beamformer_for_angle(GEOM, 2.2)
    gain = abs(np.vdot(w.weights, H.entries @ f.weights))
    assert gain == pytest.approx(alpha * 64, rel=1e-12)


# ---------- snr ----------

def test_snr_zero_channel_is_floor():
    H = ChannelMatrix(np.zeros((64, 64), dtype=complex), ())
    f = beamformer_for_angle(GEOM, 0.0)
    assert snr_db(f, H, f, BUDGET) == float("-inf")


def test_snr_closed_form_aligned_los():
    # single LoS path: SNR = EIRP - PL - noise + 10 log10(Na)
    d = 80.0
    pl = pathloss_los(d, 28.0)
    H = rank1_channel(0.5, 1.5, 10 ** (-pl / 20), length=d)
    f = beamformer_for_angle(GEOM, 0.5)
    w = beamformer_for_angle(GEOM, 1.5)
    expected = BUDGET.signal_power_dbm - pl - BUDGET.noise_power_dbm + 10 * math.log10(64)
    assert snr_db(w, H, f, BUDGET) == pytest.approx(expected, abs=1e-9)


def test_snr_misaligned_by_pi_is_lower():
    H = rank1_channel(0.5, 1.5, 1e-3)
    f_good = beamformer_for_angle(GEOM, 0.5)
    f_bad = beamformer_for_angle(GEOM, 0.5 + math.pi)
    w = beamformer_for_angle(GEOM, 1.5)
    assert snr_db(w, H, f_bad, BUDGET) < snr_db(w, H, f_good, BUDGET)


@given(st.floats(0, TWO_PI - 1e-9), st.floats(0, TWO_PI - 1e-9))
@settings(max_examples=25, deadline=None)
def test_snr_invariant_under_common_phase(az, phase):
    H = rank1_channel(1.0, 2.0, 1e-3)
    f = beamformer_for_angle(GEOM, az)
    w = beamformer_for_angle(GEOM, 2.0)
    f_rot = Beamformer(f.weights * np.exp(1j * phase))
    w_rot = Beamformer(w.weights * np.exp(1j * phase))
    base = snr_db(w, H, f, BUDGET)
    assert snr_db(w_rot, H, f, BUDGET) == pytest.approx(base, abs=1e-9)
    assert snr_db(w, H, f_rot, BUDGET) == pytest.approx(base, abs=1e-9)


def test_snr_dimension_mismatch():
    H = rank1_channel(0.0, 0.0, 1e-3)
    small = Beamformer(np.ones(4, dtype=complex) / 2.0)
    with pytest.raises(ValueError):
        snr_db(small, H, small, BUDGET)


def test_budget_validation():
    with pytest.raises(ValueError):
        LinkBudget(bandwidth_mhz=0.0)


# ---------- best rx beam ----------

def test_best_rx_beam_finds_exact_aoa():
    k = 17
    aoa = CODEBOOK64.angles[k]
    H = rank1_channel(0.3, aoa, 1e-3)
    f = beamformer_for_angle(GEOM, 0.3)
    idx, gain = best_rx_beam(H, f, CODEBOOK64)
    assert idx == k
    # oracle: brute force over the codebook
    brute = [abs(np.vdot(w.weights, H.entries @ f.weights)) for w in CODEBOOK64.beamformers]
    assert idx == int(np.argmax(brute))
    assert gain == pytest.approx(max(brute))


def test_best_rx_single_beam_codebook():
    cb1 = uniform_codebook(1, GEOM)
    H = rank1_channel(0.3, 2.0, 1e-3)
    idx, _ = best_rx_beam(H, beamformer_for_angle(GEOM, 0.3), cb1)
    assert idx == 0


@given(angle_st, angle_st)
@settings(max_examples=20, deadline=None)
def test_best_rx_gain_dominates(aod, aoa):
    H = rank1_channel(aod, aoa, 1e-3)
    f = beamformer_for_angle(GEOM, aod)
    idx, gain = best_rx_beam(H, f, CODEBOOK64)
    others = np.abs(CODEBOOK64.weight_matrix.conj().T @ (H.entries @ f.weights))
    assert gain >= others.max() - 1e-15


# ---------- svd oracle ----------

def test_svd_oracle_rank1():
    alpha = 2.5e-4
    H = rank1_channel(1.1, 2.6, alpha)
    f_opt, w_opt, sigma1 = svd_oracle(H)
    assert sigma1 == pytest.approx(alpha * 64, rel=1e-9)
    a_t = beamformer_for_angle(GEOM, 1.1).weights
    assert abs(np.vdot(f_opt.weights, a_t)) == pytest.approx(1.0, abs=1e-9)
    gain = abs(np.vdot(w_opt.weights, H.entries @ f_opt.weights))
    assert gain == pytest.approx(sigma1, rel=1e-9)


def test_svd_oracle_diagonal_matrix():
    d = np.zeros(64)
    d[5] = 3.0
    d[50] = 7.0
    H = ChannelMatrix(np.diag(d).astype(complex), ())
    _, _, sigma1 = svd_oracle(H)
    assert sigma1 == pytest.approx(7.0)


def test_svd_oracle_zero_matrix_raises():
    with pytest.raises(ValueError):
        svd_oracle(ChannelMatrix(np.zeros((8, 8), dtype=complex), ()))


def test_sigma1_bounds_random_unit_vectors():
    rng = np.random.default_rng(2)
    H = multipath_channel(rng, 3)
    _, _, sigma1 = svd_oracle(H)
    for _ in range(1000):
        w = rng.normal(size=64) + 1j * rng.normal(size=64)
        f = rng.normal(size=64) + 1j * rng.normal(size=64)
        w /= np.linalg.norm(w)
        f /= np.linalg.norm(f)
        assert abs(np.vdot(w, H.entries @ f)) <= sigma1 * (1 + 1e-9)


def test_codebook_pair_gain_bounded_by_sigma1():
    rng = np.random.default_rng(3)
    W = CODEBOOK64.weight_matrix
    for _ in range(50):
        H = multipath_channel(rng, int(rng.integers(1, 5)))
        _, _, sigma1 = svd_oracle(H)
        pair_gains = np.abs(W.conj().T @ H.entries @ W)
        assert pair_gains.max() <= sigma1 * (1 + 1e-10)


# ---------- codebooks ----------

def test_uniform_codebook_spacing():
    cb = uniform_codebook(64, GEOM)
    assert cb.depth == 64
    assert cb.angles[1] == pytest.approx(TWO_PI / 64)
    assert math.degrees(cb.angles[1]) == pytest.approx(5.625)
    diffs = np.diff(cb.angles)
    np.testing.assert_allclose(diffs, TWO_PI / 64, atol=1e-12)


def test_uniform_codebook_single_beam():
    assert uniform_codebook(1, GEOM).angles == (0.0,)


def test_uniform_codebook_roots_of_unity_sorted():
    n = 16
    cb = uniform_codebook(n, GEOM)
    expected = sorted(np.angle(np.exp(2j * np.pi * np.arange(n) / n)) % TWO_PI)
    np.testing.assert_allclose(cb.angles, expected, atol=1e-12)


def test_codebook_depth_values():
    assert codebook_depth(math.radians(5.625)) == 64
    assert codebook_depth(math.radians(20.0)) == 18  # ceil(360 / 20)
    assert codebook_depth(TWO_PI) == 1
    assert codebook_depth(math.radians(7.0)) == 52  # ceil(360 / 7) = ceil(51.43)


def test_codebook_depth_domain():
    with pytest.raises(ValueError):
        codebook_depth(0.0)
    with pytest.raises(ValueError):
        codebook_depth(TWO_PI + 0.1)


def test_codebook_csv_round_trip(tmp_path):
    cb = uniform_codebook(8, GEOM)
    path = tmp_path / "cb.csv"
    save_codebook(cb, path)
    loaded = load_codebook(path, GEOM)
    np.testing.assert_allclose(loaded.angles, cb.angles, atol=1e-12)
    np.testing.assert_allclose(loaded.weight_matrix, cb.weight_matrix, atol=1e-12)


# ---------- spectral efficiency ----------

def test_spectral_efficiency_anchors():
    assert spectral_efficiency(0.0) == pytest.approx(1.0)
    assert spectral_efficiency(10.0) == pytest.approx(math.log2(11.0))
    assert spectral_efficiency(float("-inf")) == 0.0


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_spectral_efficiency_monotone(a, b):
    if a + 1e-6 < b:  # a real gap; adjacent floats can map to the same SE
        assert spectral_efficiency(a) < spectral_efficiency(b)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from v2vbeam import (
    AngularPdf,
    LinkSample,
    ecdf,
    gain_to_snr_db,
    quantization_sweep,
    se_loss_bps_hz,
    snr_loss_db,
    svd_oracle,
)

from util import BUDGET, GEOM, rank1_channel

TWO_PI = 2 * math.pi


# ---------- ecdf ----------

def test_ecdf_repeated_value_single_point():
    e = ecdf([5, 5, 5])
    assert e.values.tolist() == [5.0]
    assert e.probs.tolist() == [1.0]


def test_ecdf_distinct_values_quarter_steps():
    e = ecdf([1, 2, 3, 4])
    assert e.values.tolist() == [1.0, 2.0, 3.0, 4.0]
    np.testing.assert_allclose(e.probs, [0.25, 0.5, 0.75, 1.0])


def test_ecdf_empty_rejected():
    with pytest.raises(ValueError):
        ecdf([])


def test_ecdf_median_of_uniform_trials():
    e = ecdf(list(range(1, 65)))
    assert e.quantile(0.5) in (32.0, 33.0)


@given(st.lists(st.integers(1, 64), min_size=1, max_size=60), st.randoms())
@settings(max_examples=30)
def test_ecdf_permutation_invariant(samples, rnd):
    shuffled = list(samples)
    rnd.shuffle(shuffled)
    a, b = ecdf(samples), ecdf(shuffled)
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.probs, b.probs)


def test_ecdf_prob_lookup():
    e = ecdf([1, 2, 3, 4])
    assert e.prob_at_or_below(0.5) == 0.0
    assert e.prob_at_or_below(2.0) == 0.5
    assert e.prob_at_or_below(9.0) == 1.0


# ---------- losses ----------

def test_snr_loss_identical_zero():
    assert snr_loss_db([3.0, 4.0], [3.0, 4.0]) == 0.0


def test_snr_loss_constant_gap():
    assert snr_loss_db([10.0, 10.0], [8.6, 8.6]) == pytest.approx(1.4)


def test_snr_loss_mixed_signs_average_linearly():
    assert snr_loss_db([10.0, 10.0], [9.0, 11.0]) == pytest.approx(0.0)


def test_loss_length_mismatch():
    with pytest.raises(ValueError):
        snr_loss_db([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        se_loss_bps_hz([1.0], [1.0, 2.0])


def test_se_loss_identical_zero():
    assert se_loss_bps_hz([5.0, -3.0], [5.0, -3.0]) == 0.0


def test_se_loss_zero_db_vs_silence():
    assert se_loss_bps_hz([0.0], [float("-inf")]) == pytest.approx(1.0)


@given(st.lists(st.tuples(st.floats(-30, 40), st.floats(0, 40)), min_size=1, max_size=30))
def test_se_loss_nonnegative_when_dominated(pairs):
    opt = [a + gap for a, gap in pairs]
    q = [a for a, _ in pairs]
    assert se_loss_bps_hz(opt, q) >= -1e-12


# ---------- quantization sweep ----------

def _rank1_links(rng, n, angle_set=None, distance=(30.0, 150.0)):
    links = []
    for i in range(n):
        if angle_set is None:
            aod = rng.uniform(0, TWO_PI)
            aoa = rng.uniform(0, TWO_PI)
        else:
            aod = angle_set[int(rng.integers(len(angle_set)))]
            aoa = angle_set[int(rng.integers(len(angle_set)))]
        d = rng.uniform(*distance)
        pl_amp = 10 ** (-(32.4 + 20 * math.log10(d) + 20 * math.log10(28)) / 20)
        links.append(LinkSample(rank1_channel(aod, aoa, pl_amp, length=d), aod, aoa, t_index=i % 7))
    return links


def test_level_zero_rank1_loss_is_tiny():
    rng = np.random.default_rng(0)
    links = _rank1_links(rng, 40)
    reports = quantization_sweep(links, levels_deg=(0.0,), geom=GEOM, budget=BUDGET)
    assert len(reports) == 1
    assert reports[0].quantizer == "none"
    assert abs(reports[0].snr_loss_db) < 0.01
    assert reports[0].n_links == 40


def test_sweep_row_layout():
    rng = np.random.default_rng(1)
    links = _rank1_links(rng, 10)
    reports = quantization_sweep(links, levels_deg=(5.0, 10.0, 15.0, 20.0), geom=GEOM, budget=BUDGET)
    assert len(reports) == 8  # 4 levels x {uniform, lloyd}
    assert [r.quantizer for r in reports] == ["uniform", "lloyd"] * 4


def test_uniform_loss_nondecreasing_over_nested_levels():
    # 10 deg beams are a subset of 5 deg beams, 20 of 10: per-link gains nest
    rng = np.random.default_rng(2)
    links = _rank1_links(rng, 30)
    reports = quantization_sweep(links, levels_deg=(5.0, 10.0, 20.0), quantizers=("uniform",), geom=GEOM, budget=BUDGET)
    losses = [r.snr_loss_db for r in reports]
    assert losses[0] <= losses[1] + 1e-12 <= losses[2] + 2e-12


def test_lloyd_beats_uniform_on_spiked_angles():
    rng = np.random.default_rng(3)
    # two off-grid departure directions dominate the campaign
    spikes = (math.radians(7.0), math.radians(191.0))
    links = _rank1_links(rng, 60, angle_set=spikes)
    reports = quantization_sweep(links, levels_deg=(20.0,), geom=GEOM, budget=BUDGET)
    by_name = {r.quantizer: r for r in reports}
    assert by_name["lloyd"].snr_loss_db <= by_name["uniform"].snr_loss_db
    assert by_name["lloyd"].se_loss_bps_hz <= by_name["uniform"].se_loss_bps_hz


def test_losses_nonnegative_against_oracle():
    rng = np.random.default_rng(4)
    links = _rank1_links(rng, 25)
    reports = quantization_sweep(links, levels_deg=(0.0, 5.0, 20.0), geom=GEOM, budget=BUDGET)
    for r in reports:
        assert r.snr_loss_db >= -1e-9
        assert r.se_loss_bps_hz >= -1e-9


def test_threshold_filters_weak_links():
    rng = np.random.default_rng(5)
    strong = _rank1_links(rng, 5, distance=(30.0, 60.0))
    weak = _rank1_links(rng, 5, distance=(40_000.0, 90_000.0))  # far below 0 dB
    for link in weak:
        _, _, sigma1 = svd_oracle(link.channel)
        assert gain_to_snr_db(sigma1, 64, BUDGET) < 0.0
    reports = quantization_sweep(strong + weak, levels_deg=(0.0,), geom=GEOM, budget=BUDGET, gamma_th_db=0.0)
    assert reports[0].n_links == 5


def test_sweep_requires_links():
    with pytest.raises(ValueError):
        quantization_sweep([], levels_deg=(0.0,))


def test_sweep_counts_timesteps():
    rng = np.random.default_rng(6)
    links = _rank1_links(rng, 20)
    reports = quantization_sweep(links, levels_deg=(0.0,), geom=GEOM, budget=BUDGET)
    assert reports[0].n_timesteps == len({link.t_index for link in links})


def test_sweep_accepts_explicit_design_pdf():
    rng = np.random.default_rng(7)
    links = _rank1_links(rng, 15)
    masses = np.zeros(64)
    masses[4] = 1.0
    pdf = AngularPdf.from_masses(masses)
    reports = quantization_sweep(links, levels_deg=(20.0,), quantizers=("lloyd",), geom=GEOM, budget=BUDGET, pdf=pdf)
    assert len(reports) == 1

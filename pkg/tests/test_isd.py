import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from atrousband import Signal, SubbandSet, decompose, dyadic_plan, leipp_plan
from atrousband.errors import InvalidArgument, SilentInput
from atrousband.isd import (
    isd,
    stereo_isd,
    tisd,
    tisd_cumulative,
    tisd_gradient,
    tisd_instant,
    tisd_windowed,
)
from atrousband.mappings import BandLabel

from .conftest import FS, tone

LABELS = (BandLabel("lo", 0, 100), BandLabel("mid", 100, 1000), BandLabel("hi", 1000, 24000))


def manual_set(*bands, fs=FS):
    bands = [np.atleast_2d(np.asarray(b, dtype=float)) for b in bands]
    return SubbandSet(bands, LABELS[: len(bands)], [0] * (len(bands) - 1),
                      max(b.shape[1] for b in bands), fs)


def test_single_nonzero_band_gets_everything():
    sb = manual_set(np.zeros(50), np.linspace(-1, 1, 50), np.zeros(60))
    rep = isd(sb)
    assert list(rep.weights_percent) == [0.0, 100.0, 0.0]
    assert rep.total_energy == pytest.approx(np.sum(np.linspace(-1, 1, 50) ** 2))


def test_silent_input_raises():
    with pytest.raises(SilentInput):
        isd(manual_set(np.zeros(10), np.zeros(12)))


def test_white_noise_dyadic_one_stage_splits_evenly():
    # Monte-Carlo oracle over 8 seeds: mean 49.96 %, std 0.09
    x = np.random.default_rng(7).standard_normal(10 * FS)
    w = isd(decompose(Signal(x, FS), dyadic_plan(FS, 1))).weights_percent
    assert abs(w[0] - 50) <= 3 and abs(w[1] - 50) <= 3


def test_level_dbfs_of_full_scale_sine():
    rep = isd(decompose(tone(1000, amp=1.0), leipp_plan(FS)))
    assert rep.level_dbfs == pytest.approx(-3.0103, abs=1e-3)


def test_instant_single_band_and_gaps():
    band = np.zeros(40)
    band[5:30] = np.sin(np.arange(25)) + 2
    series = tisd_instant(manual_set(np.zeros(40), band))
    v = series.values
    assert np.all(v[1, 5:30] == 100) and np.all(v[0, 5:30] == 0)
    assert np.all(np.isnan(v[:, :5])) and np.all(np.isnan(v[:, 30:]))
    assert v.shape == (2, 40)
    assert series.times_s[3] == 3 / FS


def equivalent_impulse_responses(plan):
    """Oracle: per-band impulse responses built by direct polynomial products."""
    pass_through = np.array([1.0])
    responses = []
    for s in plan.stages:
        h = s.filter.coefficients
        delta = np.zeros(h.size)
        delta[h.size // 2] = 1.0
        responses.append(np.convolve(pass_through, delta - h))
        pass_through = np.convolve(pass_through, h)
    responses.append(pass_through)
    return responses[::-1]


def test_instant_impulse_matches_band_impulse_responses():
    plan = dyadic_plan(FS, 3, 31)
    n, pos = 2001, 1000
    x = np.zeros(n)
    x[pos] = 1.0
    series = tisd_instant(decompose(Signal(x, FS), plan))
    peaks = np.array([r[r.size // 2] for r in equivalent_impulse_responses(plan)])
    expected = 100 * peaks**2 / np.sum(peaks**2)
    assert np.max(np.abs(series.values[:, pos] - expected)) < 1e-9


def test_windowed_full_length_equals_isd(noise):
    sb = decompose(noise, leipp_plan(FS))
    n = sb.max_length
    for kind in ("rectangular", "hann"):
        series = tisd_windowed(sb, n, 7, kind)
        assert series.values.shape == (10, 1)
        if kind == "rectangular":
            assert np.max(np.abs(series.values[:, 0] - isd(sb).weights_percent)) < 1e-9
    assert series.times_s[0] == pytest.approx((n - 1) / 2 / FS)


def test_windowed_defaults_and_errors(noise):
    sb = decompose(noise, dyadic_plan(FS, 2, 31))
    series = tisd(sb, "windowed")
    assert (series.window_len, series.hop, series.window_kind) == (2048, 1, "rectangular")
    assert series.values.shape[1] == sb.max_length - 2048 + 1
    with pytest.raises(InvalidArgument):
        tisd_windowed(sb, sb.max_length + 1, 1)
    with pytest.raises(InvalidArgument):
        tisd_windowed(sb, 100, 0)


@pytest.mark.parametrize("kind", ["rectangular", "hamming"])
def test_windowed_stationary_tone_is_steady(kind):
    plan = dyadic_plan(FS, 3, 101)
    sb = decompose(tone(5900, 0.5), plan)  # straddles the 6 kHz split
    series = tisd_windowed(sb, 2048, 64, kind)
    tail = sum(plan.stages[i].filter.num_taps for i in range(3))
    t = series.times_s * FS
    steady = (t > 2048 + tail) & (t < tone(5900, 0.5).num_frames - 2048 - tail)
    v = series.values[:, steady]
    assert np.max(np.abs(v - v[:, :1])) < 1e-3
    assert np.max(np.abs(v.sum(axis=0) - 100)) < 1e-6


def test_windowed_columns_sum_to_100(noise):
    series = tisd_windowed(decompose(noise, leipp_plan(FS)), 512, 97, "blackman")
    assert np.max(np.abs(series.values.sum(axis=0) - 100)) < 1e-6


def test_cumulative_last_column_is_isd(noise):
    sb = decompose(noise, leipp_plan(FS))
    series = tisd_cumulative(sb)
    assert np.max(np.abs(series.values[:, -1] - isd(sb).weights_percent)) < 1e-9


def test_cumulative_leading_gap_and_single_band():
    band = np.concatenate([np.zeros(10), np.ones(20)])
    v = tisd_cumulative(manual_set(np.zeros(30), band)).values
    assert np.all(np.isnan(v[:, :10]))
    assert np.all(v[1, 10:] == 100)


def test_cumulative_switching_energy_decays_monotonically():
    plan = leipp_plan(FS, 101)
    first, second = tone(300, 0.25), tone(2400, 0.25)
    x = np.concatenate([first.samples[0], second.samples[0]])
    sb = decompose(Signal(x, FS), plan)
    series = tisd_cumulative(sb)
    a = plan.band_index("low")
    # oracle: plain running sums accumulated sample by sample
    p = sb.padded()[:, 0, :] ** 2
    run = np.zeros(p.shape[0])
    expected = np.empty(p.shape[1])
    for n in range(p.shape[1]):
        run += p[:, n]
        expected[n] = 100 * run[a] / run.sum()
    assert np.max(np.abs(series.values[a] - expected)) < 1e-9
    # skip the switch transient and the stop transient at the very end
    switch = first.num_frames + 500
    after = series.values[a, switch : x.size - 500]
    assert np.all(np.diff(after) <= 1e-12)
    assert after[-1] < after[0] - 10


def test_gradient_of_constant_series():
    band = np.ones(20)
    src = tisd_cumulative(manual_set(band, band))
    grad = tisd_gradient(src)
    assert np.array_equal(grad.values[:, 0], src.values[:, 0])
    assert not np.any(grad.values[:, 1:])
    assert grad.source_variant == "cumulative"


def test_gradient_inverse_and_zero_column_sums(noise):
    sb = decompose(noise, leipp_plan(FS))
    for src in (tisd_cumulative(sb), tisd_windowed(sb, 2048, 16), tisd_instant(sb)):
        grad = tisd_gradient(src)
        assert np.max(np.abs(np.cumsum(grad.values, axis=1) - np.nan_to_num(src.values))) < 1e-9
        defined = ~np.isnan(src.values).any(axis=0)
        both = defined[1:] & defined[:-1]
        sums = grad.values[:, 1:].sum(axis=0)[both]
        assert np.max(np.abs(sums)) < 1e-6


def test_gradient_of_gradient_rejected(noise):
    grad = tisd(decompose(noise, dyadic_plan(FS, 1, 31)), "gradient")
    with pytest.raises(InvalidArgument):
        tisd_gradient(grad)


def test_stereo_modes(rng):
    plan = leipp_plan(FS, 101)
    x = rng.standard_normal(6000)
    left = decompose(Signal(x, FS), plan)
    joint = stereo_isd(left, left, "stereo_joint")
    assert joint.channel_mode == "stereo_joint"
    assert len(joint.weights_percent) == 20
    assert np.array_equal(joint.weights_percent[:10], joint.weights_percent[10:])
    assert joint.band_labels[0].name == "L:low-bass" and joint.band_labels[10].name == "R:low-bass"

    silent = decompose(Signal(np.zeros(6000), FS), plan)
    j = stereo_isd(left, silent, "joint")
    assert not np.any(j.weights_percent[10:])
    assert abs(j.weights_percent[:10].sum() - 100) < 1e-6

    right = decompose(Signal(rng.standard_normal(6000) * 3, FS), plan)
    lr = stereo_isd(left, right, "independent")
    assert [r.channel for r in lr] == ["L", "R"]
    for rep in lr:
        assert abs(rep.weights_percent.sum() - 100) < 1e-6


def test_stereo_mismatched_plans(rng):
    x = Signal(rng.standard_normal(3000), FS)
    with pytest.raises(InvalidArgument):
        stereo_isd(decompose(x, leipp_plan(FS, 31)), decompose(x, dyadic_plan(FS, 9, 31)), "joint")


def test_isd_rejects_stereo_set(rng):
    sb = decompose(Signal(rng.standard_normal((2, 2000)), FS), dyadic_plan(FS, 2, 31))
    with pytest.raises(InvalidArgument):
        isd(sb)
    assert abs(isd(sb.channel(1)).weights_percent.sum() - 100) < 1e-6


@settings(max_examples=40, deadline=None)
@given(
    x=arrays(np.float64, st.integers(1, 500), elements=st.floats(-1, 1)).filter(lambda a: np.any(a)),
    alpha=st.sampled_from([0.1, 1.0, 10.0, -2.0, 1e-3]),
)
def test_isd_normalization_and_gain_invariance(x, alpha):
    plan = leipp_plan(FS, 31)
    base = isd(decompose(Signal(x, FS), plan)).weights_percent
    scaled = isd(decompose(Signal(alpha * x, FS), plan)).weights_percent
    assert abs(base.sum() - 100) < 1e-6
    assert np.all((base >= 0) & (base <= 100))
    assert np.max(np.abs(base - scaled)) < 1e-12

import math

import numpy as np
import pytest

from blindquant.dist import Normal
from blindquant.exceptions import DomainError, UnfoldingError
from blindquant.fold import FoldParams, fold
from blindquant.quant import quantize, uniform_quantizer
from blindquant.signal import (
    BandlimitedSignal,
    SampledSignal,
    align_to_lattice,
    generate_bandlimited,
    pipeline,
    sample_signal,
    sinc_reconstruct,
    unfold,
)


def random_signal(seed, anchors=64, sigma=1.0):
    return generate_bandlimited(1.0, (anchors - 1) * math.pi, rng=seed, coefficient_dist=Normal(0, sigma))


def test_single_sinc():
    s = BandlimitedSignal(2.0, [1.0])
    assert s(0.0) == 1.0
    assert s(math.pi / 2) == pytest.approx(0.0, abs=1e-15)


def test_anchor_values_are_coefficients():
    s = random_signal(1)
    np.testing.assert_allclose(s(s.anchors), s.coefficients, atol=1e-12)
    assert s.coefficients.size == 64


def test_out_of_band_energy_is_negligible():
    s = random_signal(3, anchors=32)
    T = s.nyquist_interval / 16
    t = np.arange(-4 * 32 * 16, 5 * 32 * 16) * T
    # Kaiser taper so the finite window does not itself leak; energy is
    # counted beyond the band edge plus the taper's main-lobe half width
    x = s(t) * np.kaiser(t.size, 14)
    spectrum = np.abs(np.fft.rfft(x)) ** 2
    omega = np.fft.rfftfreq(t.size, T) * 2 * math.pi
    lobe = 2 * math.pi * math.hypot(1, 14 / math.pi) / (t.size * T)
    assert spectrum[omega > s.omega_max + lobe].sum() <= 1e-6 * spectrum.sum()


def test_sampling_grid():
    s = random_signal(2)
    nyq = sample_signal(s, s.nyquist_interval)
    np.testing.assert_allclose(nyq.samples, s.coefficients, atol=1e-12)
    assert len(sample_signal(s, s.nyquist_interval / 8)) == 8 * len(nyq)


def test_sub_nyquist_needs_override():
    s = random_signal(2)
    with pytest.raises(DomainError):
        sample_signal(s, 1.5 * s.nyquist_interval)
    assert len(sample_signal(s, 1.5 * s.nyquist_interval, allow_subnyquist=True)) > 0


def test_sampled_signal_validation():
    with pytest.raises(DomainError):
        SampledSignal([], 1.0)
    with pytest.raises(DomainError):
        SampledSignal([1.0], 0.0)


def test_reconstruction_on_grid_is_exact():
    s = random_signal(4)
    ss = sample_signal(s, s.nyquist_interval)
    np.testing.assert_allclose(sinc_reconstruct(ss, 1.0, ss.times), ss.samples, atol=1e-12)


@pytest.mark.parametrize("oversampling", [1, 4])
def test_reconstruction_between_samples(oversampling):
    s = random_signal(5, anchors=128)
    window = (-200 * math.pi, 327 * math.pi)
    ss = sample_signal(s, s.nyquist_interval / oversampling, window)
    # central half of the anchor span, halfway between samples
    t = np.linspace(32 * math.pi, 95 * math.pi, 500) + ss.interval / 2
    err = np.abs(sinc_reconstruct(ss, 1.0, t) - s(t))
    assert err.max() <= 1e-3 * np.abs(s.coefficients).max()


def test_reconstruction_rejects_undersampled():
    s = random_signal(5)
    ss = sample_signal(s, 2 * s.nyquist_interval, allow_subnyquist=True)
    with pytest.raises(DomainError):
        sinc_reconstruct(ss, 1.0, 0.0)


def test_unfold_leaves_unwrapped_sequence_alone():
    x = 0.9 * np.sin(np.linspace(0, 3, 200))
    np.testing.assert_array_equal(unfold(x, 1.0, 2), x)


def test_unfold_ramp_first_order():
    x = 0.3 * np.arange(100)
    y = fold(x, FoldParams(1, 1))
    est, _ = align_to_lattice(unfold(y, 1.0, 1), x, 2.0)
    np.testing.assert_allclose(est, x, atol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_unfold_exact_without_quantization(seed):
    s = random_signal(seed)
    ss = sample_signal(s, s.nyquist_interval / 16)
    x = 3.0 * ss.samples / np.abs(ss.samples).max()
    rec = unfold(SampledSignal(fold(x, FoldParams(1, 1)), ss.interval), 1.0, 2, 16)
    est, _ = align_to_lattice(rec.samples, x, 2.0)
    assert np.max(np.abs(est - x)) <= 1e-9


@pytest.mark.parametrize("order", [1, 2, 3])
@pytest.mark.parametrize("seed", range(8))
def test_unfold_succeeds_under_difference_bound(order, seed):
    s = random_signal(100 + seed)
    x = sample_signal(s, s.nyquist_interval / 16).samples
    step = 2.0 / 256
    dmax = np.abs(np.diff(x, order)).max()
    # largest gain that keeps max|diff| + 2^K step/2 below the half-range
    gain = 0.95 * (1.0 - 2 ** order * step / 2) / dmax
    y = quantize(uniform_quantizer(256, -1, 1), fold(x, FoldParams(gain, 1)))
    est, _ = align_to_lattice(unfold(y, 1.0, order, 16) / gain, x, 2.0 / gain)
    assert np.max(np.abs(est - x)) <= step / gain


@pytest.mark.parametrize("oversampling", [8, 16])
@pytest.mark.parametrize("gain", [20.0, 40.0, 80.0])
def test_unfold_failures_are_not_silent(oversampling, gain):
    for seed in range(10):
        s = random_signal(200 + seed, sigma=2.0)
        x = sample_signal(s, s.nyquist_interval / oversampling).samples
        y = quantize(uniform_quantizer(256, -1, 1), fold(x, FoldParams(gain, 1)))
        try:
            rec = unfold(y, 1.0, 2, oversampling)
        except UnfoldingError:
            continue
        est, _ = align_to_lattice(rec / gain, x, 2.0 / gain)
        assert np.max(np.abs(est - x)) <= 1.0 / gain


def test_unfold_input_checks():
    with pytest.raises(DomainError):
        unfold([0.1, 0.2], 1.0, 2)
    with pytest.raises(DomainError):
        unfold([0.1, 1.0, 0.2, 0.3], 1.0, 2)


def test_pipeline_identity_fold_matches_direct():
    s = random_signal(7, sigma=0.2)
    rep = pipeline(s, FoldParams(1, 1), 256, 16, 2)
    assert rep.unfolded and rep.offset_periods == 0
    assert rep.nmse_folded == pytest.approx(rep.nmse_direct, rel=1e-12)


def test_pipeline_clipping_regime_and_noise_floor():
    p = FoldParams(4, 1)
    s = random_signal(8, sigma=2.0)
    rep = pipeline(s, p, 256, 16, 2)
    assert rep.unfolded
    assert rep.nmse_folded < rep.nmse_direct
    step = 2.0 / 256
    # the folded path quantizes gain * x, so its granular floor is (step / gain)^2 / 12
    floor = (step / p.gain) ** 2 / 12 / np.mean(rep.truth ** 2)
    assert rep.nmse_folded >= 0.5 * floor


def test_pipeline_is_deterministic():
    a = pipeline(random_signal(9, sigma=2.0), FoldParams(4, 1))
    b = pipeline(random_signal(9, sigma=2.0), FoldParams(4, 1))
    np.testing.assert_array_equal(a.recovered, b.recovered)
    assert a.nmse_folded == b.nmse_folded


def test_pipeline_reports_unfolding_failure():
    rep = pipeline(random_signal(10, sigma=2.0), FoldParams(80, 1), 256, 8, 2)
    assert not rep.unfolded and rep.error and math.isinf(rep.nmse_folded)

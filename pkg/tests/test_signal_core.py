import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.signal import butter, sosfreqz

from hapticpred.errors import CropError, FilterError, IngestError, NormalError, SegmentError, ShapeError
from hapticpred.signal_core import (ProcessedSignals, Recording, TimeSeries, bandpass, crop_ends,
                                    dft321, load_recording, lowpass, normal_force, preprocess,
                                    resample, segment, speed_magnitude, write_raw_recording)


def rms(x):
    return float(np.sqrt(np.mean(np.square(x))))


def sine(freq, fs, seconds):
    t = np.arange(int(round(fs * seconds))) / fs
    return TimeSeries(np.sin(2 * np.pi * freq * t), fs)


# --- TimeSeries -----------------------------------------------------------------

def test_timeseries_rejects_empty_and_nonfinite():
    with pytest.raises(IngestError):
        TimeSeries(np.array([]), 1000)
    with pytest.raises(IngestError):
        TimeSeries(np.array([1.0, np.nan]), 1000)


# --- resample -------------------------------------------------------------------

def test_resample_constant_8k_to_1k():
    out = resample(TimeSeries(np.full(8000, 3.0), 8000), 1000)
    assert out.sample_rate_hz == 1000
    assert len(out) == 1000
    assert np.all(out.samples == 3.0)


def test_resample_same_rate_is_bit_identical(rng):
    ts = TimeSeries(rng.normal(size=(500, 3)), 1000)
    out = resample(ts, 1000)
    assert out.samples.tobytes() == ts.samples.tobytes()


def test_resample_sine_3k_to_1k_matches_analytic():
    out = resample(sine(10, 3000, 1.0), 1000)
    t = np.arange(len(out)) / 1000
    assert np.max(np.abs(out.samples - np.sin(2 * np.pi * 10 * t))) < 1e-3


@given(st.integers(50, 3000), st.sampled_from([250, 500, 1000, 2000]))
def test_resample_preserves_duration(n, target):
    ts = TimeSeries(np.linspace(0, 1, n), 1234.0)
    out = resample(ts, target)
    assert abs(out.duration_s - ts.duration_s) <= 1.0 / target


# --- crop -----------------------------------------------------------------------

def test_crop_60s_to_55s():
    out = crop_ends(TimeSeries(np.zeros(60000), 1000), 2.5)
    assert len(out) == 55000
    assert out.duration_s == pytest.approx(55.0)


def test_crop_zero_is_identity(rng):
    ts = TimeSeries(rng.normal(size=77), 100)
    assert np.array_equal(crop_ends(ts, 0).samples, ts.samples)


def test_crop_index_arithmetic():
    out = crop_ends(TimeSeries(np.arange(10.0), 1), 2)
    assert out.samples.tolist() == [2, 3, 4, 5, 6, 7]


def test_crop_too_long():
    with pytest.raises(CropError):
        crop_ends(TimeSeries(np.zeros(10), 1), 5)


# --- filters --------------------------------------------------------------------

def butter_gain(freq, fs, **kw):
    """|H|^2 of a 4th-order Butterworth, i.e. the forward-backward magnitude."""
    sos = butter(4, fs=fs, output="sos", **kw)
    _, h = sosfreqz(sos, worN=[freq], fs=fs)
    return float(np.abs(h[0]) ** 2)


def test_lowpass_dc_gain():
    out = lowpass(TimeSeries(np.full(2000, 5.0), 1000), 25)
    assert np.max(np.abs(out.samples[200:-200] - 5.0)) < 1e-6


def test_lowpass_attenuates_200hz_by_60db():
    x = sine(200, 1000, 4.0)
    y = lowpass(x, 25)
    # forward-backward squares the single-pass response
    assert butter_gain(200, 1000, Wn=25, btype="low") < 1e-3
    assert 20 * np.log10(rms(y.samples[500:-500]) / rms(x.samples)) <= -60


def test_lowpass_passes_5hz():
    x = sine(5, 1000, 4.0)
    y = lowpass(x, 25)
    expected = butter_gain(5, 1000, Wn=25, btype="low")
    ratio = rms(y.samples[500:-500]) / rms(x.samples[500:-500])
    assert abs(ratio - 1) < 0.02
    assert ratio == pytest.approx(expected, abs=5e-3)


def test_lowpass_rejects_cutoff_at_nyquist():
    with pytest.raises(FilterError):
        lowpass(TimeSeries(np.zeros(100), 1000), 500)


def test_bandpass_removes_gravity():
    out = bandpass(TimeSeries(np.full(3000, 9.8), 1000), 20, 500)
    assert abs(out.samples.mean()) < 1e-6


def test_bandpass_passes_100hz():
    x = sine(100, 1000, 4.0)
    y = bandpass(x, 20, 500)
    assert abs(rms(y.samples[500:-500]) / rms(x.samples) - 1) < 0.03


def test_bandpass_attenuates_5hz_by_40db():
    x = sine(5, 1000, 8.0)
    y = bandpass(x, 20, 500)
    assert 20 * np.log10(rms(y.samples[1000:-1000]) / rms(x.samples)) <= -40


@pytest.mark.parametrize("lo,hi", [(0, 100), (100, 50), (20, 600)])
def test_bandpass_invalid(lo, hi):
    with pytest.raises(FilterError):
        bandpass(TimeSeries(np.zeros(100), 1000), lo, hi)


@pytest.mark.parametrize("filt,freq", [(lambda ts: lowpass(ts, 25), 10),
                                       (lambda ts: bandpass(ts, 20, 500), 60)])
def test_filters_are_zero_phase(filt, freq):
    x = sine(freq, 1000, 4.0)
    y = filt(x).samples[500:-500]
    xs = x.samples[500:-500]
    lags = np.arange(-5, 6)
    corr = [np.dot(xs[5:-5], np.roll(y, k)[5:-5]) for k in lags]
    assert lags[int(np.argmax(corr))] == 0


# --- DFT321 ---------------------------------------------------------------------

def test_dft321_single_axis_matches_input_spectrum(rng):
    s = rng.normal(size=257)
    out = dft321(TimeSeries(np.column_stack([s, 0 * s, 0 * s]), 1000))
    assert np.allclose(np.abs(np.fft.rfft(out.samples)), np.abs(np.fft.rfft(s)), rtol=0, atol=1e-9)


def test_dft321_impulses_give_flat_spectrum():
    x = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=float)
    out = dft321(TimeSeries(x, 1000))
    assert np.allclose(np.abs(np.fft.fft(out.samples)) ** 2, 3.0, atol=1e-12)


@given(st.integers(4, 600), st.integers(0, 2**31 - 1))
def test_dft321_energy_and_magnitude(n, seed):
    x = np.random.default_rng(seed).normal(size=(n, 3))
    out = dft321(TimeSeries(x, 1000)).samples
    assert abs(np.sum(out ** 2) - np.sum(x ** 2)) <= 1e-9 * np.sum(x ** 2)
    mag2 = np.sum(np.abs(np.fft.rfft(x, axis=0)) ** 2, axis=1)
    assert np.allclose(np.abs(np.fft.rfft(out)) ** 2, mag2, rtol=1e-9, atol=1e-9)


def test_dft321_needs_three_channels():
    with pytest.raises(ShapeError):
        dft321(TimeSeries(np.zeros((10, 2)), 1000))


# --- speed / normal force --------------------------------------------------------

def test_speed_pythagorean():
    out = speed_magnitude(TimeSeries(np.tile([3.0, 4.0, 0.0], (5, 1)), 1000))
    assert np.all(out.samples == 5.0)


def test_speed_zero_and_single_axis(rng):
    assert np.all(speed_magnitude(TimeSeries(np.zeros((4, 3)), 1)).samples == 0)
    v = rng.normal(size=20)
    out = speed_magnitude(TimeSeries(np.column_stack([v, 0 * v, 0 * v]), 1))
    assert np.array_equal(out.samples, np.abs(v))


def test_speed_rotation_invariant(rng):
    from scipy.spatial.transform import Rotation

    R = Rotation.from_euler("xyz", [0.3, -1.1, 2.0]).as_matrix()
    v = rng.normal(size=(100, 3))
    a = speed_magnitude(TimeSeries(v, 1)).samples
    b = speed_magnitude(TimeSeries(v @ R.T, 1)).samples
    assert np.allclose(a, b, atol=1e-9)


@pytest.mark.parametrize("force,normal,expected", [
    ((0, 0, -2), (0, 0, 1), -2), ((1, 1, 0), (0, 0, 1), 0), ((1, 2, 2), (1 / 3, 2 / 3, 2 / 3), 3)])
def test_normal_force_examples(force, normal, expected):
    out = normal_force(TimeSeries(np.tile(force, (3, 1)).astype(float), 1), normal)
    assert np.allclose(out.samples, expected, atol=1e-12)


def test_normal_force_rejects_non_unit():
    with pytest.raises(NormalError):
        normal_force(TimeSeries(np.zeros((3, 3)), 1), (0, 0, 1.01))


# --- segment ---------------------------------------------------------------------

def test_segment_count_55k():
    assert segment(TimeSeries(np.zeros(55000), 1000), 500, 250).shape == (219, 500)


def test_segment_exact_window(rng):
    x = rng.normal(size=500)
    out = segment(TimeSeries(x, 1000), 500, 250)
    assert out.shape == (1, 500) and np.array_equal(out[0], x)


def test_segment_disjoint(rng):
    x = rng.normal(size=1000)
    out = segment(TimeSeries(x, 1000), 500, 500)
    assert np.array_equal(out.reshape(-1), x)


def test_segment_too_short():
    with pytest.raises(SegmentError):
        segment(TimeSeries(np.zeros(100), 1000), 500, 250)


@given(st.integers(1, 400), st.integers(1, 50), st.integers(1, 60))
def test_segment_count_formula(n, w, hop):
    ts = TimeSeries(np.arange(float(n)), 1)
    if w > n:
        with pytest.raises(SegmentError):
            segment(ts, w, hop)
        return
    out = segment(ts, w, hop)
    assert len(out) == (n - w) // hop + 1
    assert all(out[i, 0] == i * hop for i in range(len(out)))
    if hop == w:
        assert np.array_equal(out.reshape(-1), ts.samples[:len(out) * w])


# --- recording I/O and pipeline -------------------------------------------------

def make_recording(seconds=8.0):
    t3 = np.arange(int(3000 * seconds)) / 3000
    t8 = np.arange(int(8000 * seconds)) / 8000
    t1 = np.arange(int(1000 * seconds)) / 1000
    acc = np.column_stack([np.sin(2 * np.pi * 80 * t3), np.cos(2 * np.pi * 120 * t3), 9.8 + 0 * t3])
    frc = np.column_stack([0 * t8, 0 * t8, 1.0 + 0.1 * np.sin(2 * np.pi * t8)])
    vel = np.column_stack([0.1 + 0 * t1, 0 * t1, 0 * t1])
    return Recording("X1", TimeSeries(acc, 3000), TimeSeries(frc, 8000), TimeSeries(vel, 1000),
                     class_label="C00")


def test_preprocess_multi_rate_recording():
    sig = preprocess(make_recording())
    assert sig.a.sample_rate_hz == sig.v.sample_rate_hz == sig.f.sample_rate_hz == 1000
    assert len(sig.a) == len(sig.v) == len(sig.f) == 3000
    assert np.allclose(sig.v.samples, 0.1, atol=1e-6)


def test_raw_directory_round_trip(tmp_path):
    rec = make_recording()
    write_raw_recording(tmp_path / "X1", rec)
    loaded = load_recording(tmp_path / "X1")
    assert loaded.texture_id == "X1" and loaded.class_label == "C00"
    for ts in (loaded.accel_xyz, loaded.force_xyz, loaded.velocity_xyz):
        assert ts.sample_rate_hz == 1000 and np.all(np.isfinite(ts.samples))
    assert len(loaded.accel_xyz) == len(loaded.force_xyz) == len(loaded.velocity_xyz)
    sig = preprocess(loaded)
    ref = preprocess(rec)
    assert abs(len(sig.a) - len(ref.a)) <= 1


def test_processed_csv_round_trip(tmp_path):
    sig = preprocess(make_recording())
    sig.to_csv(tmp_path / "processed.csv")
    header = (tmp_path / "processed.csv").read_text().splitlines()[0]
    assert header == "t_s,a,v,f"
    back = ProcessedSignals.from_csv(tmp_path / "processed.csv", "X1")
    assert back.a.sample_rate_hz == 1000
    assert np.allclose(back.f.samples, sig.f.samples, rtol=1e-5, atol=1e-6)


def test_load_recording_missing_file(tmp_path):
    with pytest.raises(IngestError):
        load_recording(tmp_path)

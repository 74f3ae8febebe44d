import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srenhance.audio_io import (Waveform, measure_global_snr, mix_at_snr, mix_components,
                                read_wav, write_wav)
from srenhance.errors import (CorruptHeader, NoiseTooShort, NotFound, SampleRateMismatch,
                              SilentInput, UnsupportedFormat)

from conftest import wav_bytes


def test_read_single_sample_scaling(make_wav):
    w = read_wav(make_wav("a.wav", [16384]))
    assert w.samples.tolist() == [0.5]
    assert w.sample_rate_hz == 8000


def test_read_zeros(make_wav):
    assert read_wav(make_wav("z.wav", [0, 0, 0])).samples.tolist() == [0.0, 0.0, 0.0]


def test_read_stereo_is_mean_downmixed(make_wav):
    left, right = round(0.2 * 32768), round(0.4 * 32768)
    w = read_wav(make_wav("s.wav", [left, right], channels=2))
    assert w.samples[0] == pytest.approx(0.3, abs=1 / 32768)


def test_read_preserves_rate_and_skips_unknown_chunks(make_wav):
    junk = b"LIST" + struct.pack("<I", 3) + b"abc\x00"  # odd size, padded
    w = read_wav(make_wav("r.wav", [1, 2, 3], rate=16000, extra_chunks=junk))
    assert w.sample_rate_hz == 16000
    assert len(w) == 3


def test_read_errors(tmp_path, make_wav):
    with pytest.raises(NotFound):
        read_wav(tmp_path / "missing.wav")
    with pytest.raises(UnsupportedFormat):
        read_wav(make_wav("f.wav", b"\x00" * 8, bits=32, fmt_tag=3))
    with pytest.raises(UnsupportedFormat):
        read_wav(make_wav("b8.wav", b"\x80\x80", bits=8))
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"RIFX0000WAVE")
    with pytest.raises(CorruptHeader):
        read_wav(bad)
    trunc = tmp_path / "trunc.wav"
    trunc.write_bytes(wav_bytes([1, 2, 3, 4])[:-3])
    with pytest.raises(CorruptHeader):
        read_wav(trunc)


def test_write_exact_samples(tmp_path):
    path = tmp_path / "o.wav"
    write_wav(Waveform([0.5, 1.5, -2.0]), path)
    raw = path.read_bytes()
    assert raw[:4] == b"RIFF" and raw[8:12] == b"WAVE"
    pcm = np.frombuffer(raw[44:], dtype="<i2")
    assert pcm.tolist() == [16384, 32767, -32768]


def test_tone_round_trip_within_one_step(tmp_path):
    t = np.arange(8000) / 8000
    w = Waveform(0.8 * np.sin(2 * np.pi * 440 * t))
    write_wav(w, tmp_path / "t.wav")
    back = read_wav(tmp_path / "t.wav")
    assert np.max(np.abs(back.samples - w.samples)) <= 1 / 32768


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0 - 1 / 32768), min_size=1, max_size=200))
def test_round_trip_property(tmp_path_factory, xs):
    path = tmp_path_factory.mktemp("rt") / "x.wav"
    write_wav(Waveform(xs), path)
    assert np.max(np.abs(read_wav(path).samples - np.array(xs))) <= 1 / 32768


def _rms_signal(rng, n, rms):
    x = rng.normal(size=n)
    return Waveform(x * rms / np.sqrt(np.mean(x ** 2)))


@pytest.mark.parametrize("target, gain", [(0.0, 1.0), (20.0, 0.1)])
def test_mix_gain_for_equal_rms(rng, target, gain):
    clean = _rms_signal(rng, 4000, 0.1)
    noise = _rms_signal(rng, 4000, 0.1)
    _, scaled = mix_components(clean, noise, target)
    assert np.allclose(scaled.samples, gain * noise.samples, rtol=1e-12)


@pytest.mark.parametrize("target", [-5.0, 0.0, 5.0, 10.0, 15.0, 33.3])
def test_mix_exact_by_direct_summation(rng, target):
    clean = Waveform(rng.normal(size=3000) * 0.2)
    noise = Waveform(rng.uniform(-1, 1, size=5000))
    noisy, scaled = mix_components(clean, noise, target)
    # two-pass oracle: recover the added noise, sum energies with fsum
    added = noisy.samples - clean.samples
    oracle = 10 * math.log10(math.fsum(clean.samples ** 2) / math.fsum(scaled.samples ** 2))
    assert abs(oracle - target) < 1e-9
    assert np.allclose(added, scaled.samples, atol=1e-15)


def test_mix_is_linear_in_noise(rng):
    clean = Waveform(rng.normal(size=1000))
    noise = Waveform(rng.normal(size=1500))
    noisy = mix_at_snr(clean, noise, 7.0)
    ratio = (noisy.samples - clean.samples) / noise.samples[:1000]
    assert np.allclose(ratio, ratio[0], rtol=1e-9)


def test_mix_truncates_from_start_and_seeded_offset(rng):
    clean = Waveform(rng.normal(size=100))
    noise = Waveform(np.arange(1, 301, dtype=float))
    _, scaled = mix_components(clean, noise, 0.0)
    assert np.allclose(scaled.samples / scaled.samples[0], np.arange(1, 101))
    a = mix_at_snr(clean, noise, 0.0, random_offset=True, seed=5)
    b = mix_at_snr(clean, noise, 0.0, random_offset=True, seed=5)
    assert np.array_equal(a.samples, b.samples)


def test_mix_errors(rng):
    clean = Waveform(rng.normal(size=100))
    with pytest.raises(SampleRateMismatch):
        mix_at_snr(clean, Waveform(rng.normal(size=200), 16000), 0.0)
    with pytest.raises(NoiseTooShort):
        mix_at_snr(clean, Waveform(rng.normal(size=50)), 0.0)
    with pytest.raises(SilentInput):
        mix_at_snr(Waveform(np.zeros(100)), Waveform(rng.normal(size=100)), 0.0)
    with pytest.raises(SilentInput):
        mix_at_snr(clean, Waveform(np.zeros(100)), 0.0)


def test_measure_global_snr(rng):
    x = Waveform(rng.normal(size=500))
    assert measure_global_snr(x, x) == 0.0
    assert measure_global_snr(x, Waveform(0.5 * x.samples)) == pytest.approx(6.0206, abs=1e-4)
    y = Waveform(rng.normal(size=500))
    oracle = 10 * math.log10(sum(v * v for v in x.samples) / sum(v * v for v in y.samples))
    assert measure_global_snr(x, y) == pytest.approx(oracle, abs=1e-9)
    with pytest.raises(SilentInput):
        measure_global_snr(x, Waveform(np.zeros(500)))


def test_waveform_rejects_bad_input():
    with pytest.raises(ValueError):
        Waveform([0.0, float("nan")])
    with pytest.raises(ValueError):
        Waveform([0.0], 0)

"""Seeded synthetic test signals: a speech-like source and stand-in noises.

None of these model a real corpus; they exist so the pipeline, the metrics and
the report builder can be exercised reproducibly without external audio.
"""
from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from .audio_io import DEFAULT_RATE, Waveform

NOISE_TYPES = ("car", "airport", "train")


def _rms_normalize(x, rms=0.1):
    return x * (rms / np.sqrt(np.mean(x ** 2)))


def _voiced_burst(n, rate, rng):
    t = np.arange(n) / rate
    f0 = rng.uniform(100, 180) * (1 + 0.15 * np.sin(2 * np.pi * rng.uniform(1, 3) * t))
    phase = 2 * np.pi * np.cumsum(f0) / rate
    formants = rng.uniform([400, 1100, 2300], [800, 1800, 3000])
    out = np.zeros(n)
    for h in range(1, int(3600 / f0.max()) + 1):
        fh = h * f0.mean()
        amp = sum(np.exp(-0.5 * ((fh - f) / 150.0) ** 2) for f in formants) + 0.05
        out += amp * np.sin(h * phase) / h ** 0.5
    # syllabic amplitude modulation with tapered edges
    env = 0.6 + 0.4 * np.sin(2 * np.pi * rng.uniform(3, 6) * t + rng.uniform(0, np.pi))
    env *= np.hanning(n)
    return out * env


def speech_like(duration_s=3.0, rate=DEFAULT_RATE, seed=0, lead_pause_s=0.3):
    """Voiced bursts of 0.2-0.45 s separated by exact-zero pauses of 0.15-0.35 s."""
    rng = np.random.default_rng(seed)
    n_total = int(round(duration_s * rate))
    x = np.zeros(n_total)
    pos = int(lead_pause_s * rate)
    while True:
        n = int(rng.uniform(0.2, 0.45) * rate)
        if pos + n > n_total:
            break
        x[pos:pos + n] = _voiced_burst(n, rate, rng)
        pos += n + int(rng.uniform(0.15, 0.35) * rate)
    return Waveform(0.5 * x / np.max(np.abs(x)), rate)


def white_noise(duration_s, rate=DEFAULT_RATE, seed=0, std=0.1):
    rng = np.random.default_rng(seed)
    return Waveform(rng.normal(0.0, std, int(round(duration_s * rate))), rate)


def car_noise(duration_s, rate=DEFAULT_RATE, seed=0):
    """Low-frequency dominated rumble: white noise through a leaky integrator."""
    rng = np.random.default_rng(seed)
    w = rng.normal(size=int(round(duration_s * rate)))
    return Waveform(_rms_normalize(lfilter([1.0], [1.0, -0.95], w)), rate)


def airport_noise(duration_s, rate=DEFAULT_RATE, seed=0, talkers=6):
    """Babble: overlapping speech-like talkers over a diffuse floor."""
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * rate))
    x = 0.02 * rng.normal(size=n)
    for i in range(talkers):
        talker = speech_like(duration_s, rate, seed=seed * 100 + i, lead_pause_s=0.0)
        x += np.roll(talker.samples, int(rng.integers(0, n)))
    return Waveform(_rms_normalize(x), rate)


def train_noise(duration_s, rate=DEFAULT_RATE, seed=0):
    """Rumble plus periodic broadband wheel clatter."""
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * rate))
    t = np.arange(n) / rate
    rumble = lfilter([1.0], [1.0, -0.9], rng.normal(size=n))
    clatter = rng.normal(size=n) * (np.sin(2 * np.pi * 1.7 * t) > 0.8)
    return Waveform(_rms_normalize(rumble + 2.0 * clatter), rate)


def noise(kind, duration_s, rate=DEFAULT_RATE, seed=0):
    makers = {"car": car_noise, "airport": airport_noise, "train": train_noise,
              "white": white_noise}
    try:
        maker = makers[kind]
    except KeyError:
        raise ValueError(f"unknown noise type {kind!r}") from None
    return maker(duration_s, rate, seed=seed)

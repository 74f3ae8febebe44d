"""PCM WAV input/output and additive noisy-mixture construction."""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (CorruptHeader, LengthMismatch, NoiseTooShort, NotFound, SampleRateMismatch,
                     SilentInput, SrEnhanceError, UnsupportedFormat)

DEFAULT_RATE = 8000
_FULL_SCALE = 32768.0
_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True, eq=False)
class Waveform:
    """Mono signal with amplitudes nominally in [-1, 1)."""

    samples: np.ndarray
    sample_rate_hz: int = DEFAULT_RATE

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if not np.all(np.isfinite(x)):
            raise ValueError("waveform contains non-finite samples")
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self):
        return self.samples.size / self.sample_rate_hz

    def energy(self):
        return float(np.dot(self.samples, self.samples))


def _parse_fmt(body):
    if len(body) < 16:
        raise CorruptHeader(f"fmt chunk too short ({len(body)} bytes)")
    tag, channels, rate, _, block_align, bits = struct.unpack("<HHIIHH", body[:16])
    if tag == _WAVE_FORMAT_EXTENSIBLE:
        if len(body) < 40:
            raise CorruptHeader("truncated WAVE_FORMAT_EXTENSIBLE header")
        # sub-format GUID starts at byte 24; its first two bytes hold the format tag
        tag = struct.unpack("<H", body[24:26])[0]
    if tag != _WAVE_FORMAT_PCM:
        raise UnsupportedFormat(f"format tag {tag:#06x} is not PCM")
    if bits != 16:
        raise UnsupportedFormat(f"{bits}-bit samples are not supported, need 16-bit")
    if channels < 1 or rate < 1 or block_align != 2 * channels:
        raise CorruptHeader(
            f"inconsistent fmt chunk: channels={channels} rate={rate} block_align={block_align}")
    return channels, rate


def read_wav(path) -> Waveform:
    """Read a 16-bit PCM WAV file, averaging multiple channels down to mono."""
    path = os.fspath(path)
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except FileNotFoundError:
        raise NotFound(f"no such file: {path}") from None

    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise CorruptHeader(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id, size = struct.unpack("<4sI", raw[pos:pos + 8])
        body = raw[pos + 8:pos + 8 + size]
        if len(body) < size:
            raise CorruptHeader(f"{path}: chunk {chunk_id!r} truncated")
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(body)
        elif chunk_id == b"data":
            if fmt is None:
                raise CorruptHeader(f"{path}: data chunk precedes fmt chunk")
            data = body
            break
        pos += 8 + size + (size & 1)

    if fmt is None or data is None:
        raise CorruptHeader(f"{path}: missing fmt or data chunk")
    channels, rate = fmt
    if len(data) % (2 * channels):
        raise CorruptHeader(f"{path}: data size is not a whole number of frames")

    pcm = np.frombuffer(data, dtype="<i2").reshape(-1, channels).astype(np.float64)
    return Waveform(pcm.mean(axis=1) / _FULL_SCALE, rate)


def to_pcm16(samples):
    q = np.rint(np.asarray(samples, dtype=np.float64) * _FULL_SCALE)
    return np.clip(q, -32768, 32767).astype("<i2")


def write_wav(wave: Waveform, path) -> None:
    """Write ``wave`` as mono 16-bit PCM; out-of-range samples are clipped."""
    pcm = to_pcm16(wave.samples).tobytes()
    rate = int(wave.sample_rate_hz)
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, _WAVE_FORMAT_PCM, 1, rate, 2 * rate, 2, 16,
        b"data", len(pcm))
    try:
        with open(os.fspath(path), "wb") as f:
            f.write(header)
            f.write(pcm)
    except OSError as e:
        raise SrEnhanceError(f"cannot write {path}: {e}") from e


def measure_global_snr(clean: Waveform, noise: Waveform) -> float:
    """Return 10*log10(sum(clean**2) / sum(noise**2)) in dB."""
    if len(clean) != len(noise):
        raise LengthMismatch(f"length mismatch: {len(clean)} vs {len(noise)}")
    if clean.sample_rate_hz != noise.sample_rate_hz:
        raise SampleRateMismatch(f"{clean.sample_rate_hz} Hz vs {noise.sample_rate_hz} Hz")
    e_clean = clean.energy()
    e_noise = noise.energy()
    if e_clean == 0.0 or e_noise == 0.0:
        raise SilentInput("zero-energy signal")
    return 10.0 * np.log10(e_clean / e_noise)


def noise_segment(clean: Waveform, noise: Waveform, offset=0):
    """Slice ``len(clean)`` samples of noise starting at ``offset``."""
    if clean.sample_rate_hz != noise.sample_rate_hz:
        raise SampleRateMismatch(
            f"clean is {clean.sample_rate_hz} Hz, noise is {noise.sample_rate_hz} Hz")
    if offset < 0 or offset + len(clean) > len(noise):
        raise NoiseTooShort(
            f"need {len(clean)} noise samples from offset {offset}, have {len(noise)}")
    return noise.samples[offset:offset + len(clean)]


def mix_at_snr(clean: Waveform, noise: Waveform, target_snr_db: float,
               random_offset=False, seed=None):
    """Add noise to ``clean`` scaled to reach ``target_snr_db`` over the whole signal.

    The noise is truncated, never looped. By default the first ``len(clean)``
    noise samples are used; with ``random_offset`` the start is drawn from a
    generator seeded with ``seed``.

    Returns the noisy mixture. :func:`mix_components` also returns the scaled
    noise.
    """
    return mix_components(clean, noise, target_snr_db, random_offset, seed)[0]


def mix_components(clean, noise, target_snr_db, random_offset=False, seed=None):
    offset = 0
    if random_offset:
        slack = len(noise) - len(clean)
        if slack < 0:
            raise NoiseTooShort(f"noise has {len(noise)} samples, clean has {len(clean)}")
        offset = int(np.random.default_rng(seed).integers(0, slack + 1))
    q = noise_segment(clean, noise, offset)
    e_clean = clean.energy()
    e_noise = float(np.dot(q, q))
    if e_clean == 0.0:
        raise SilentInput("clean signal has zero energy")
    if e_noise == 0.0:
        raise SilentInput("noise segment has zero energy")
    g = np.sqrt(e_clean / (e_noise * 10.0 ** (target_snr_db / 10.0)))
    scaled = Waveform(g * q, clean.sample_rate_hz)
    return Waveform(clean.samples + scaled.samples, clean.sample_rate_hz), scaled

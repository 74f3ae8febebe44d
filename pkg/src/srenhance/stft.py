"""Hamming-windowed short-time Fourier analysis and overlap-add synthesis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .audio_io import DEFAULT_RATE, Waveform
from .errors import ColaViolation, IndexOutOfRange, InvalidLength, InvalidParameter, SignalTooShort

NORMALIZER_FLOOR = 1e-8


@dataclass(frozen=True)
class StftParams:
    """Framing parameters.

    The window is the generalized Hamming family
    ``w[n] = window_c0 - window_coeff * cos(2*pi*n / (frame_len - 1))``.
    """

    frame_len: int = 256
    hop: int = 128
    window_coeff: float = 0.46
    fft_size: int = 256
    window_c0: float = 0.54

    def __post_init__(self):
        if self.frame_len < 2:
            raise InvalidLength(f"frame_len must be >= 2, got {self.frame_len}")
        if not 1 <= self.hop <= self.frame_len:
            raise InvalidParameter(f"hop must be in [1, frame_len], got {self.hop}")
        if self.fft_size < self.frame_len or self.fft_size & (self.fft_size - 1):
            raise InvalidParameter(
                f"fft_size must be a power of two >= frame_len, got {self.fft_size}")
        if not 0.0 < self.window_coeff < 1.0:
            raise InvalidParameter(f"window_coeff must be in (0, 1), got {self.window_coeff}")
        norm = cola_normalizer(hamming_window(self), self.hop)
        if norm.min() < NORMALIZER_FLOOR:
            raise ColaViolation(
                f"summed squared window drops to {norm.min():.3g} with hop {self.hop}")

    @property
    def n_bins(self):
        return self.fft_size // 2 + 1

    @classmethod
    def for_rate(cls, sample_rate_hz, frame_ms=32.0, overlap=0.5, **kw):
        """Parameters with the same frame duration as the 8 kHz defaults."""
        frame_len = max(2, int(round(sample_rate_hz * frame_ms / 1000.0)))
        hop = max(1, int(round(frame_len * (1.0 - overlap))))
        fft_size = 1 << (frame_len - 1).bit_length()
        return cls(frame_len=frame_len, hop=hop, fft_size=fft_size, **kw)


def hamming_window(params: StftParams) -> np.ndarray:
    n_w = params.frame_len
    if n_w < 2:
        raise InvalidLength(f"window length must be >= 2, got {n_w}")
    n = np.arange(n_w)
    return params.window_c0 - params.window_coeff * np.cos(2.0 * np.pi * n / (n_w - 1))


def cola_normalizer(window, hop):
    """Summed squared window seen by each sample position of one hop period
    in the fully overlapped interior."""
    w2 = np.asarray(window) ** 2
    pad = (-w2.size) % hop
    return np.pad(w2, (0, pad)).reshape(-1, hop).sum(axis=0)


@dataclass(frozen=True, eq=False)
class StftMatrix:
    """One row per frame, one column per non-negative frequency bin."""

    frames: np.ndarray
    params: StftParams
    sample_rate_hz: int = DEFAULT_RATE

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.complex128)
        if frames.ndim != 2 or frames.shape[1] != self.params.n_bins:
            raise InvalidParameter(
                f"expected (frames, {self.params.n_bins}) coefficients, got {frames.shape}")
        frames = frames.copy()
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self):
        return self.frames.shape[0]

    @property
    def n_bins(self):
        return self.frames.shape[1]

    @property
    def signal_length(self):
        """Length of the waveform overlap-add synthesis produces."""
        if self.n_frames == 0:
            return 0
        return (self.n_frames - 1) * self.params.hop + self.params.frame_len

    def with_frames(self, frames):
        return StftMatrix(frames, self.params, self.sample_rate_hz)


def n_frames_for(n_samples, params):
    if n_samples < params.frame_len:
        return 0
    return 1 + (n_samples - params.frame_len) // params.hop


def stft(wave: Waveform, params: StftParams = StftParams()) -> StftMatrix:
    """Analyze ``wave`` into full frames; a tail shorter than one hop is dropped."""
    x = wave.samples
    if x.size < params.frame_len:
        raise SignalTooShort(
            f"signal has {x.size} samples, a frame needs {params.frame_len}")
    segments = sliding_window_view(x, params.frame_len)[::params.hop]
    spec = np.fft.rfft(segments * hamming_window(params), n=params.fft_size, axis=1)
    return StftMatrix(spec, params, wave.sample_rate_hz)


def istft_overlap_add(mat: StftMatrix) -> Waveform:
    """Weighted overlap-add synthesis normalized by the summed squared window."""
    p = mat.params
    n_out = mat.signal_length
    window = hamming_window(p)
    out = np.zeros(n_out)
    norm = np.zeros(n_out)
    if mat.n_frames:
        segments = np.fft.irfft(mat.frames, n=p.fft_size, axis=1)[:, :p.frame_len] * window
        for m, seg in enumerate(segments):
            start = m * p.hop
            out[start:start + p.frame_len] += seg
            norm[start:start + p.frame_len] += window ** 2

    edge = p.frame_len - p.hop
    interior = norm[edge:n_out - edge]
    if interior.size and interior.min() < NORMALIZER_FLOOR:
        raise ColaViolation(f"synthesis normalizer drops to {interior.min():.3g}")
    ok = norm >= NORMALIZER_FLOOR
    out[ok] /= norm[ok]
    out[~ok] = 0.0
    return Waveform(out, mat.sample_rate_hz)


def power_spectrum(mat: StftMatrix, m: int) -> np.ndarray:
    if not 0 <= m < mat.n_frames:
        raise IndexOutOfRange(f"frame {m} outside [0, {mat.n_frames})")
    c = mat.frames[m]
    return c.real ** 2 + c.imag ** 2


def power_frames(mat: StftMatrix) -> np.ndarray:
    """|X(m, k)|^2 for every frame."""
    return mat.frames.real ** 2 + mat.frames.imag ** 2


def bin_weights(fft_size):
    """One-sided Parseval weights: sum(w * |X|^2) equals the frame energy."""
    w = np.full(fft_size // 2 + 1, 2.0 / fft_size)
    w[0] = 1.0 / fft_size
    w[-1] = 1.0 / fft_size
    return w

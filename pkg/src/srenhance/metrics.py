"""Objective quality measures: segmental SNR and LPC log-likelihood ratio."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .audio_io import Waveform
from .errors import (AllFramesSilent, InvalidParameter, LengthMismatch, SampleRateMismatch,
                     SingularAutocorrelation)

SILENT_ENERGY = 1e-10


@dataclass(frozen=True)
class MetricParams:
    seg_frame_ms: float = 30.0
    seg_overlap: float = 0.75
    seg_min_db: float = -10.0
    seg_max_db: float = 35.0
    lpc_order: int | None = None     # None: 10 at 8 kHz, else ceil(rate/1000) + 2
    llr_trim: float = 0.95

    def __post_init__(self):
        if not 0.0 < self.seg_overlap < 1.0:
            raise InvalidParameter(f"seg_overlap must be in (0, 1), got {self.seg_overlap}")
        if not self.seg_min_db < self.seg_max_db:
            raise InvalidParameter("seg_min_db must be below seg_max_db")
        if self.lpc_order is not None and self.lpc_order < 2:
            raise InvalidParameter(f"lpc_order must be >= 2, got {self.lpc_order}")
        if not 0.0 < self.llr_trim <= 1.0:
            raise InvalidParameter(f"llr_trim must be in (0, 1], got {self.llr_trim}")
        if self.seg_frame_ms <= 0:
            raise InvalidParameter("seg_frame_ms must be positive")

    def order_for(self, rate):
        if self.lpc_order is not None:
            return self.lpc_order
        return 10 if rate == 8000 else math.ceil(rate / 1000) + 2

    def framing(self, rate):
        win = max(2, int(round(self.seg_frame_ms * rate / 1000.0)))
        hop = max(1, int(round(win * (1.0 - self.seg_overlap))))
        return win, hop


def _check_pair(clean, enhanced):
    if clean.sample_rate_hz != enhanced.sample_rate_hz:
        raise SampleRateMismatch(f"{clean.sample_rate_hz} Hz vs {enhanced.sample_rate_hz} Hz")
    if len(clean) != len(enhanced):
        raise LengthMismatch(f"clean has {len(clean)} samples, enhanced {len(enhanced)}")


def _frames(x, win, hop):
    if x.size < win:
        return x[np.newaxis, :]
    return sliding_window_view(x, win)[::hop]


def segmental_snr(clean: Waveform, enhanced: Waveform, p: MetricParams = MetricParams()) -> float:
    """Mean of per-frame SNRs clamped to [seg_min_db, seg_max_db].

    Frames whose clean energy is below 1e-10 are left out.
    """
    _check_pair(clean, enhanced)
    win, hop = p.framing(clean.sample_rate_hz)
    s = _frames(clean.samples, win, hop)
    r = _frames(clean.samples - enhanced.samples, win, hop)
    sig = np.einsum("ij,ij->i", s, s)
    res = np.einsum("ij,ij->i", r, r)
    keep = sig >= SILENT_ENERGY
    if not keep.any():
        raise AllFramesSilent("every clean frame is below the silence threshold")
    # difference of logs: a zero residual floored at tiny would overflow the ratio
    snr = 10.0 * (np.log10(sig[keep]) - np.log10(np.maximum(res[keep], np.finfo(float).tiny)))
    return float(np.mean(np.clip(snr, p.seg_min_db, p.seg_max_db)))


def autocorrelation(frame, order):
    x = np.asarray(frame, dtype=np.float64)
    n = x.size
    return np.array([np.dot(x[:n - k], x[k:]) for k in range(order + 1)])


def levinson_durbin(r, order):
    """Solve the autocorrelation normal equations for a[0] = 1, a[1..order]."""
    if r[0] <= 0.0:
        raise SingularAutocorrelation("zero-energy frame")
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    for i in range(1, order + 1):
        k = -np.dot(a[:i], r[i:0:-1]) / err
        if not abs(k) < 1.0:
            raise SingularAutocorrelation(f"reflection coefficient {k:.6g} at order {i}")
        a[1:i + 1] = a[1:i + 1] + k * a[i - 1::-1][:i]
        err *= 1.0 - k * k
        if err <= 0.0:
            raise SingularAutocorrelation(f"prediction error vanished at order {i}")
    return a


def lpc_coefficients(frame, order):
    """Return ``(a, r)``: prediction polynomial with a[0] = 1 and the autocorrelation.

    The caller is expected to window the frame.
    """
    x = np.asarray(frame, dtype=np.float64)
    if x.size <= order:
        raise InvalidParameter(f"frame of {x.size} samples too short for order {order}")
    r = autocorrelation(x, order)
    return levinson_durbin(r, order), r


def _toeplitz_form(a, r):
    """a R a^T for the symmetric Toeplitz matrix built from r."""
    idx = np.abs(np.subtract.outer(np.arange(a.size), np.arange(a.size)))
    return float(a @ r[idx] @ a)


def llr_frames(clean: Waveform, enhanced: Waveform, p: MetricParams = MetricParams()):
    """Per-frame log-likelihood ratios, skipping silent and singular frames."""
    _check_pair(clean, enhanced)
    rate = clean.sample_rate_hz
    order = p.order_for(rate)
    win, hop = p.framing(rate)
    window = np.hanning(win + 2)[1:-1]
    out = []
    for c, e in zip(_frames(clean.samples, win, hop), _frames(enhanced.samples, win, hop)):
        if np.dot(c, c) < SILENT_ENERGY:
            continue
        try:
            a_c, r_c = lpc_coefficients(c * window[:c.size], order)
            a_e, _ = lpc_coefficients(e * window[:e.size], order)
        except SingularAutocorrelation:
            continue
        out.append(math.log(_toeplitz_form(a_e, r_c) / _toeplitz_form(a_c, r_c)))
    return np.array(out)


def llr(clean: Waveform, enhanced: Waveform, p: MetricParams = MetricParams()) -> float:
    """Trimmed mean of per-frame LLR (lowest ``llr_trim`` fraction kept)."""
    d = llr_frames(clean, enhanced, p)
    if d.size == 0:
        raise AllFramesSilent("no frame yields a usable LPC model")
    keep = max(1, int(round(d.size * p.llr_trim)))
    return float(np.mean(np.sort(d)[:keep]))

"""Wiener-gain speech enhancement driven by the SR or WAT noise tracker."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio_io import Waveform
from .classifier import ClassifierThresholds
from .errors import InvalidParameter, SignalTooShort
from .stft import StftMatrix, StftParams, istft_overlap_add, n_frames_for, power_frames, stft
from .tracker import METHODS, TrackerParams, run_tracker


@dataclass(frozen=True)
class EnhanceConfig:
    method: str = "sr"
    dd_alpha: float = 0.98
    gain_floor: float = 0.1
    tracker: TrackerParams = field(default_factory=TrackerParams)
    stft: StftParams = field(default_factory=StftParams)
    thresholds: ClassifierThresholds = field(default_factory=ClassifierThresholds)
    init_frames: int = 6
    speech_run_limit_s: float | None = 0.5

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidParameter(f"method must be one of {METHODS}, got {self.method!r}")
        if not 0.0 <= self.dd_alpha < 1.0:
            raise InvalidParameter(f"dd_alpha must be in [0, 1), got {self.dd_alpha}")
        if not 0.0 < self.gain_floor < 1.0:
            raise InvalidParameter(f"gain_floor must be in (0, 1), got {self.gain_floor}")
        if self.init_frames < 1:
            raise InvalidParameter(f"init_frames must be >= 1, got {self.init_frames}")
        if self.speech_run_limit_s is not None and self.speech_run_limit_s <= 0:
            raise InvalidParameter("speech_run_limit_s must be positive or None")

    def speech_run_limit(self, sample_rate_hz):
        """The speech-run cap converted to frames."""
        if self.speech_run_limit_s is None:
            return None
        return int(np.ceil(self.speech_run_limit_s * sample_rate_hz / self.stft.hop))


def prior_snr_dd(prev_gain, prev_post, post, dd_alpha):
    """Decision-directed a priori SNR."""
    return (dd_alpha * np.square(prev_gain) * prev_post
            + (1.0 - dd_alpha) * np.maximum(np.asarray(post) - 1.0, 0.0))


def wiener_gain(prior, floor):
    prior = np.asarray(prior, dtype=np.float64)
    return np.maximum(prior / (1.0 + prior), floor)


def spectral_gains(powers, noise, dd_alpha=0.98, gain_floor=0.1, noise_floor=1e-12):
    """Per-frame Wiener gains from noisy powers and a noise trajectory.

    Both arrays are (frames, bins). The decision-directed recursion starts
    from zero gain and zero posterior SNR.
    """
    powers = np.asarray(powers, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    gains = np.empty_like(powers)
    prev_gain = np.zeros(powers.shape[1])
    prev_post = np.zeros(powers.shape[1])
    for m in range(powers.shape[0]):
        post = powers[m] / np.maximum(noise[m], noise_floor)
        prior = prior_snr_dd(prev_gain, prev_post, post, dd_alpha)
        gains[m] = wiener_gain(prior, gain_floor)
        prev_gain, prev_post = gains[m], post
    return gains


@dataclass
class EnhanceResult:
    wave: Waveform
    classes: list | None       # FrameClass per frame (SR only)
    gains: np.ndarray          # (frames, bins)
    noise: np.ndarray          # (frames, bins) noise PSD estimate
    presence: np.ndarray       # (frames, bins) presence probability

    def trace_rows(self):
        """Per-frame summary rows for the trace CSV."""
        rows = []
        for m in range(self.gains.shape[0]):
            row = {"frame": m}
            if self.classes is not None:
                row["class"] = self.classes[m].label
            row["mean_noise_psd"] = float(self.noise[m].mean())
            row["mean_presence_prob"] = float(self.presence[m].mean())
            row["mean_gain"] = float(self.gains[m].mean())
            rows.append(row)
        return rows


def apply_gains(mat: StftMatrix, gains) -> Waveform:
    """Scale each coefficient by a real gain (noisy phase kept) and resynthesize."""
    return istft_overlap_add(mat.with_frames(mat.frames * gains))


def enhance(noisy: Waveform, cfg: EnhanceConfig = EnhanceConfig()) -> EnhanceResult:
    """Enhance ``noisy``.

    The first ``cfg.init_frames`` frames are assumed noise-only and seed the
    tracker. The output covers whole frames only:
    ``n_frames * hop + (frame_len - hop)`` samples.
    """
    if n_frames_for(len(noisy), cfg.stft) < 2:
        raise SignalTooShort(
            f"{len(noisy)} samples give fewer than two {cfg.stft.frame_len}-sample frames")
    mat = stft(noisy, cfg.stft)
    powers = power_frames(mat)
    track = run_tracker(powers, cfg.method, cfg.tracker, cfg.thresholds,
                        init_frames=cfg.init_frames,
                        speech_run_limit=cfg.speech_run_limit(noisy.sample_rate_hz))
    gains = spectral_gains(powers, track.noise, cfg.dd_alpha, cfg.gain_floor, cfg.tracker.floor)
    return EnhanceResult(apply_gains(mat, gains), track.classes, gains, track.noise,
                         track.presence)

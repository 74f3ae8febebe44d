"""Signal-to-residual ratio, distortion regions and three-way frame labels."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BinCountMismatch, InvalidParameter, NegativeMagnitude, ZeroNoiseEstimate

SR_EPS = 1e-12


class DistortionRegion(enum.Enum):
    ATTENUATION_ONLY = "AttenuationOnly"
    AMPLIFICATION_UNDER_6DB = "AmplificationUnder6dB"
    AMPLIFICATION_OVER_6DB = "AmplificationOver6dB"


class FrameClass(enum.IntEnum):
    NON_SPEECH = 0
    QUASI_SPEECH = 1
    PURE_SPEECH = 2

    @property
    def label(self):
        return ("NonSpeech", "QuasiSpeech", "PureSpeech")[self]


@dataclass(frozen=True)
class ClassifierThresholds:
    """Bounds on the estimated a priori SNR (power ratio, not dB).

    ``low`` defaults to 1/3: below it the unprocessed noisy magnitude would
    exceed twice the clean magnitude, i.e. more than 6.02 dB of amplification.
    """

    low: float = 1.0 / 3.0
    high: float = 3.0

    def __post_init__(self):
        if not 0.0 < self.low < self.high:
            raise InvalidParameter(
                f"need 0 < low < high, got low={self.low} high={self.high}")


def _check_magnitudes(*arrays):
    for a in arrays:
        if np.any(np.asarray(a) < 0):
            raise NegativeMagnitude("magnitudes must be non-negative")


def compute_sr(clean_mag, est_mag, eps=SR_EPS):
    """SR(k) = S(k)^2 / max((S(k) - S_hat(k))^2, eps)."""
    s = np.asarray(clean_mag, dtype=np.float64)
    s_hat = np.asarray(est_mag, dtype=np.float64)
    _check_magnitudes(s, s_hat)
    if eps <= 0:
        raise InvalidParameter(f"eps must be positive, got {eps}")
    return s ** 2 / np.maximum((s - s_hat) ** 2, eps)


def classify_region_oracle(clean_mag: float, est_mag: float) -> DistortionRegion:
    """Distortion region of an estimate given the true magnitude.

    Boundary values go to the lower region: S_hat == S is attenuation-only and
    S_hat == 2*S is still under the 6.02 dB amplification bound.
    """
    _check_magnitudes(clean_mag, est_mag)
    if est_mag <= clean_mag:
        return DistortionRegion.ATTENUATION_ONLY
    if est_mag <= 2.0 * clean_mag:
        return DistortionRegion.AMPLIFICATION_UNDER_6DB
    return DistortionRegion.AMPLIFICATION_OVER_6DB


def region_map(clean_mag, est_mag):
    """Vectorized region labels as integer codes 0, 1, 2 (enum order)."""
    s = np.asarray(clean_mag, dtype=np.float64)
    s_hat = np.asarray(est_mag, dtype=np.float64)
    _check_magnitudes(s, s_hat)
    return np.where(s_hat <= s, 0, np.where(s_hat <= 2.0 * s, 1, 2))


def estimate_snr(frame_power, noise_psd):
    """Blind per-bin SNR estimate max(|X|^2 / noise - 1, 0)."""
    p = np.asarray(frame_power, dtype=np.float64)
    n = np.asarray(noise_psd, dtype=np.float64)
    if p.shape != n.shape:
        raise BinCountMismatch(f"{p.shape} power bins vs {n.shape} noise bins")
    if np.any(n <= 0):
        raise ZeroNoiseEstimate("noise estimate must be positive in every bin")
    return np.maximum(p / n - 1.0, 0.0)


def classify_snr(rho: float, th: ClassifierThresholds = ClassifierThresholds()) -> FrameClass:
    if rho < th.low:
        return FrameClass.NON_SPEECH
    if rho < th.high:
        return FrameClass.QUASI_SPEECH
    return FrameClass.PURE_SPEECH


def frame_snr(frame_power, noise_psd):
    """rho = max(mean_k(|X|^2 / noise) - 1, 0)."""
    p = np.asarray(frame_power, dtype=np.float64)
    n = np.asarray(noise_psd, dtype=np.float64)
    if p.shape != n.shape:
        raise BinCountMismatch(f"{p.shape} power bins vs {n.shape} noise bins")
    if np.any(n <= 0):
        raise ZeroNoiseEstimate("noise estimate must be positive in every bin")
    return max(float(np.mean(p / n)) - 1.0, 0.0)


def classify_frame(frame_power, noise_psd,
                   th: ClassifierThresholds = ClassifierThresholds()) -> FrameClass:
    return classify_snr(frame_snr(frame_power, noise_psd), th)


def classify_bins(frame_power, noise_psd, th: ClassifierThresholds = ClassifierThresholds()):
    """Per-bin labels as integer FrameClass codes."""
    rho = estimate_snr(frame_power, noise_psd)
    return np.where(rho < th.low, 0, np.where(rho < th.high, 1, 2))

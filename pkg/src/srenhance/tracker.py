"""Recursive per-bin noise PSD tracking.

Two estimators share the same smoothing / minimum-tracking / presence
machinery and differ only in the final noise update:

* SR: the frame label (non-speech, quasi-speech, pure speech) selects the
  update rule.
* WAT (weighted average technique): the presence-weighted rule in every frame.

Each ``step_*`` consumes one frame power spectrum and advances a
:class:`TrackerState` in place.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifier import ClassifierThresholds, FrameClass, classify_frame
from .errors import EmptyInit, InvalidParameter, UninitializedState

METHODS = ("sr", "wat")


@dataclass(frozen=True)
class TrackerParams:
    alpha: float = 0.98          # non-speech noise smoothing
    alpha_s: float = 0.85        # base of the time-frequency smoothing factor
    alpha_b: float = 0.2         # presence-probability smoothing
    beta: float = 0.96           # minimum tracking look-back weight
    gamma: float = 0.998         # minimum tracking decay
    xi: float = 0.7              # noisy power smoothing
    delta: float = 5.0           # presence ratio threshold
    soft_presence: bool = False
    logistic_slope: float = 1.0
    presence_source: str = "prob"  # "prob": smoothed b; "ratio": clamped raw ratio
    floor: float = 1e-12

    XI_MAX = 0.98

    def __post_init__(self):
        for name in ("alpha", "alpha_s", "alpha_b", "beta", "gamma", "xi"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise InvalidParameter(f"{name} must be in (0, 1), got {v}")
        if self.xi > self.XI_MAX:
            raise InvalidParameter(f"xi is capped at {self.XI_MAX}, got {self.xi}")
        if not self.delta > 1.0:
            raise InvalidParameter(f"delta must exceed 1, got {self.delta}")
        if not self.gamma > self.beta:
            raise InvalidParameter(f"need gamma > beta, got {self.gamma} <= {self.beta}")
        if not self.logistic_slope > 0:
            raise InvalidParameter(f"logistic_slope must be positive, got {self.logistic_slope}")
        if self.presence_source not in ("prob", "ratio"):
            raise InvalidParameter("presence_source must be 'prob' or 'ratio'")
        if not self.floor > 0:
            raise InvalidParameter(f"floor must be positive, got {self.floor}")


@dataclass
class TrackerState:
    params: TrackerParams
    noise_psd: np.ndarray
    smoothed_power: np.ndarray
    prev_smoothed_power: np.ndarray
    running_min: np.ndarray
    presence_prob: np.ndarray
    presence_ratio: np.ndarray
    posterior: np.ndarray
    frame_index: int
    tf_smoothing: np.ndarray = field(default=None)

    @property
    def n_bins(self):
        return self.noise_psd.size


def init_tracker(params: TrackerParams, initial_frames) -> TrackerState:
    """State seeded with the per-bin mean power of ``initial_frames``."""
    frames = np.atleast_2d(np.asarray(initial_frames, dtype=np.float64))
    if frames.size == 0 or frames.shape[0] < 1:
        raise EmptyInit("tracker initialization needs at least one frame")
    mean = frames.mean(axis=0)
    return TrackerState(
        params=params,
        noise_psd=mean.copy(),
        smoothed_power=mean.copy(),
        prev_smoothed_power=mean.copy(),
        running_min=mean.copy(),
        presence_prob=np.zeros_like(mean),
        presence_ratio=np.ones_like(mean),
        posterior=np.ones_like(mean),
        frame_index=frames.shape[0],
        tf_smoothing=np.full_like(mean, params.alpha_s),
    )


def sigmoid(x, slope=1.0):
    """Logistic function 1 / (1 + exp(-slope * x)), overflow-safe."""
    z = slope * np.asarray(x, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def smooth_noisy_power(state: TrackerState, frame_power):
    xi = state.params.xi
    state.prev_smoothed_power = state.smoothed_power
    state.smoothed_power = xi * state.smoothed_power + (1.0 - xi) * frame_power
    return state.smoothed_power


def track_minimum(state: TrackerState):
    """Continuous minimum tracking of the smoothed noisy power.

    Where the previous minimum is at or below the current smoothed power the
    minimum follows it slowly; otherwise it snaps down. The result is kept in
    [0, B(m, k)].
    """
    p = state.params
    b = state.smoothed_power
    b_prev = state.prev_smoothed_power
    b_min = state.running_min
    rising = p.gamma * b_min + (1.0 - p.gamma) / (1.0 - p.beta) * (b - p.beta * b_prev)
    state.running_min = np.where(b_min <= b, np.clip(rising, 0.0, b), b)
    return state.running_min


def speech_presence_ratio(state: TrackerState, frame_power):
    state.presence_ratio = frame_power / np.maximum(state.running_min, state.params.floor)
    return state.presence_ratio


def update_presence_prob(state: TrackerState):
    p = state.params
    if p.soft_presence:
        indicator = sigmoid(state.presence_ratio - p.delta, p.logistic_slope)
    else:
        indicator = (state.presence_ratio > p.delta).astype(np.float64)
    b = p.alpha_b * state.presence_prob + (1.0 - p.alpha_b) * indicator
    state.presence_prob = np.clip(b, 0.0, 1.0)
    return state.presence_prob


def posterior_snr(state: TrackerState):
    """r(m, k) = B(m-1, k) / noise estimate, evaluated before the noise update."""
    state.posterior = state.prev_smoothed_power / np.maximum(state.noise_psd, state.params.floor)
    return state.posterior


def time_freq_smoothing(state: TrackerState):
    p = state.params
    if p.presence_source == "ratio":
        presence = np.clip(state.presence_ratio, 0.0, 1.0)
    else:
        presence = state.presence_prob
    state.tf_smoothing = p.alpha_s + (1.0 - p.alpha_s) * presence
    return state.tf_smoothing


def _advance(state, frame_power):
    if state is None or state.noise_psd is None:
        raise UninitializedState("tracker used before init_tracker")
    frame_power = np.asarray(frame_power, dtype=np.float64)
    if frame_power.shape != state.noise_psd.shape:
        raise InvalidParameter(
            f"frame has {frame_power.shape} bins, tracker has {state.noise_psd.shape}")
    smooth_noisy_power(state, frame_power)
    track_minimum(state)
    speech_presence_ratio(state, frame_power)
    update_presence_prob(state)
    posterior_snr(state)
    time_freq_smoothing(state)
    return frame_power


def _weighted_update(state, frame_power):
    a = state.tf_smoothing
    return a * state.noise_psd + (1.0 - a) * frame_power


def step_sr(state: TrackerState, frame_power, frame_class: FrameClass):
    """Advance one frame with the class-dependent noise update.

    Non-speech frames use the fixed smoothing ``alpha``, quasi-speech frames the
    presence-weighted factor, and pure-speech frames hold the estimate.
    """
    frame_power = _advance(state, frame_power)
    if frame_class == FrameClass.NON_SPEECH:
        a = state.params.alpha
        noise = a * state.noise_psd + (1.0 - a) * frame_power
    elif frame_class == FrameClass.QUASI_SPEECH:
        noise = _weighted_update(state, frame_power)
    else:
        noise = state.noise_psd.copy()
    state.noise_psd = noise
    state.frame_index += 1
    return noise


def step_wat(state: TrackerState, frame_power):
    frame_power = _advance(state, frame_power)
    state.noise_psd = _weighted_update(state, frame_power)
    state.frame_index += 1
    return state.noise_psd


@dataclass
class TrackResult:
    noise: np.ndarray          # (frames, bins) estimate after each frame
    classes: list              # FrameClass per frame; None for WAT
    presence: np.ndarray       # (frames, bins) presence probability


def run_tracker(powers, method="sr", params: TrackerParams = TrackerParams(),
                thresholds: ClassifierThresholds = ClassifierThresholds(),
                init_frames=6, speech_run_limit=None, classes=None) -> TrackResult:
    """Track the noise PSD through a (frames, bins) power matrix.

    The first ``init_frames`` frames seed the state and are reported as
    non-speech with the seed as their estimate. For SR each later frame is
    classified against the previous frame's estimate. ``speech_run_limit``
    (frames) caps how long the classifier may go without a non-speech label:
    past it, frames are relabelled non-speech until the classifier itself
    reports one, so a persistent rise in noise level cannot freeze the
    estimate. Passing ``classes`` skips classification and the cap entirely.
    """
    if method not in METHODS:
        raise InvalidParameter(f"method must be one of {METHODS}, got {method!r}")
    powers = np.asarray(powers, dtype=np.float64)
    n_frames = powers.shape[0]
    m0 = min(init_frames, n_frames)
    state = init_tracker(params, powers[:m0])

    noise = np.empty_like(powers)
    presence = np.zeros_like(powers)
    noise[:m0] = state.noise_psd
    labels = [FrameClass.NON_SPEECH] * m0 if method == "sr" else None

    run = 0
    for m in range(m0, n_frames):
        if method == "wat":
            step_wat(state, powers[m])
        else:
            if classes is not None:
                cls = FrameClass(classes[m])
            else:
                cls = classify_frame(powers[m], np.maximum(state.noise_psd, params.floor),
                                     thresholds)
                run = 0 if cls == FrameClass.NON_SPEECH else run + 1
                if speech_run_limit is not None and run > speech_run_limit:
                    cls = FrameClass.NON_SPEECH
            labels.append(cls)
            step_sr(state, powers[m], cls)
        noise[m] = state.noise_psd
        presence[m] = state.presence_prob
    return TrackResult(noise, labels, presence)

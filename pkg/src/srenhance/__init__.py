"""Single-channel speech enhancement with SR frame classification and noise tracking."""
from .audio_io import Waveform, measure_global_snr, mix_at_snr, read_wav, write_wav
from .classifier import (ClassifierThresholds, DistortionRegion, FrameClass, classify_frame,
                         classify_region_oracle, compute_sr)
from .enhancer import EnhanceConfig, enhance
from .metrics import MetricParams, llr, segmental_snr
from .stft import StftMatrix, StftParams, istft_overlap_add, stft
from .tracker import TrackerParams, TrackerState, init_tracker, run_tracker, step_sr, step_wat

__version__ = "0.1.0"

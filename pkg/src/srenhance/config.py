"""Flat ``key = value`` run configuration.

One setting per line, ``#`` starts a comment. Keys are ``section.field`` where
section is one of stft, tracker, classifier, enhance, metrics, run::

    # 16 ms hop at 8 kHz
    stft.hop = 128
    tracker.delta = 5.0
    enhance.speech_run_limit_s = none

Unknown keys and values that violate a parameter's constraints are rejected
before anything runs.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, replace
from pathlib import Path

from .classifier import ClassifierThresholds
from .enhancer import EnhanceConfig
from .errors import InvalidParameter, NotFound
from .metrics import MetricParams
from .stft import StftParams
from .tracker import TrackerParams


@dataclass(frozen=True)
class RunSettings:
    seed: int | None = None
    random_offset: bool = False
    workers: int = 1
    dyn_range_db: float = 60.0

    def __post_init__(self):
        if self.workers < 1:
            raise InvalidParameter(f"workers must be >= 1, got {self.workers}")
        if self.dyn_range_db <= 0:
            raise InvalidParameter(f"dyn_range_db must be positive, got {self.dyn_range_db}")


_SECTIONS = {
    "stft": StftParams,
    "tracker": TrackerParams,
    "classifier": ClassifierThresholds,
    "enhance": EnhanceConfig,
    "metrics": MetricParams,
    "run": RunSettings,
}
# enhance.* only exposes its scalar fields; nested parameter sets have their own sections
_NESTED = {"tracker", "stft", "thresholds"}
# settings that accept "none", with the type used otherwise
_NULLABLE = {"metrics.lpc_order": int, "run.seed": int, "enhance.speech_run_limit_s": float}


def _coerce(key, text, default):
    text = text.strip()
    if key in _NULLABLE:
        if text.lower() == "none":
            return None
        kind = _NULLABLE[key]
    else:
        kind = type(default)
    try:
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        return text
    except ValueError as e:
        raise InvalidParameter(f"{key}: {e}") from None


def _default_of(f):
    if f.default is not dataclasses.MISSING:
        return f.default
    return f.default_factory()


@dataclass(frozen=True)
class RunConfig:
    stft: StftParams = field(default_factory=StftParams)
    tracker: TrackerParams = field(default_factory=TrackerParams)
    thresholds: ClassifierThresholds = field(default_factory=ClassifierThresholds)
    enhance: EnhanceConfig = field(default_factory=EnhanceConfig)
    metrics: MetricParams = field(default_factory=MetricParams)
    run: RunSettings = field(default_factory=RunSettings)

    @classmethod
    def parse(cls, text, source="<config>"):
        values = {name: {} for name in _SECTIONS}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameter(f"{source}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            section, _, name = key.partition(".")
            if section not in _SECTIONS:
                raise InvalidParameter(f"{source}:{lineno}: unknown key {key!r}")
            fields = {f.name: f for f in dataclasses.fields(_SECTIONS[section])}
            if name not in fields or (section == "enhance" and name in _NESTED):
                raise InvalidParameter(f"{source}:{lineno}: unknown key {key!r}")
            if name in values[section]:
                raise InvalidParameter(f"{source}:{lineno}: duplicate key {key!r}")
            values[section][name] = _coerce(key, value, _default_of(fields[name]))

        try:
            stft = StftParams(**values["stft"])
            tracker = TrackerParams(**values["tracker"])
            thresholds = ClassifierThresholds(**values["classifier"])
            enhance = EnhanceConfig(**values["enhance"], tracker=tracker, stft=stft,
                                    thresholds=thresholds)
            metrics = MetricParams(**values["metrics"])
            run = RunSettings(**values["run"])
        except InvalidParameter as e:
            raise type(e)(f"{source}: {e}") from None
        return cls(stft, tracker, thresholds, enhance, metrics, run)

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFound(f"no such config file: {path}") from None
        return cls.parse(text, str(path))

    def with_method(self, method):
        return replace(self, enhance=replace(self.enhance, method=method))

    def to_text(self):
        """Serialize every setting; ``parse(to_text())`` reproduces this config."""
        lines = []
        objs = {"stft": self.stft, "tracker": self.tracker, "classifier": self.thresholds,
                "enhance": self.enhance, "metrics": self.metrics, "run": self.run}
        for section, obj in objs.items():
            for f in dataclasses.fields(obj):
                if section == "enhance" and f.name in _NESTED:
                    continue
                v = getattr(obj, f.name)
                if v is None:
                    text = "none"
                elif isinstance(v, bool):
                    text = "true" if v else "false"
                else:
                    text = repr(v) if isinstance(v, float) else str(v)
                lines.append(f"{section}.{f.name} = {text}")
        return "\n".join(lines) + "\n"

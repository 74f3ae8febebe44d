"""Evaluation over (noise type, SNR) conditions, serialized as CSV/JSON tables."""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .audio_io import Waveform, mix_at_snr, read_wav
from .enhancer import EnhanceConfig, enhance
from .errors import InvalidParameter, SrEnhanceError
from .metrics import MetricParams, llr, segmental_snr

FIELDS = ("noise_type", "snr_db", "method", "llr", "seg_snr")
MANIFEST_FIELDS = ("clean", "noise", "snr_db", "noise_type")


@dataclass(frozen=True)
class ReportRow:
    noise_type: str
    snr_db: float
    method: str
    llr: float
    seg_snr: float

    @property
    def key(self):
        return (self.noise_type, self.snr_db, self.method)


@dataclass
class MetricsReport:
    rows: list = field(default_factory=list)

    def add(self, row: ReportRow):
        if any(r.key == row.key for r in self.rows):
            raise InvalidParameter(f"duplicate condition {row.key}")
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def get(self, noise_type, snr_db, method):
        for r in self.rows:
            if r.key == (noise_type, snr_db, method):
                return r
        raise KeyError((noise_type, snr_db, method))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIELDS)
        for r in self.rows:
            w.writerow([r.noise_type, f"{r.snr_db:g}", r.method, f"{r.llr:.6f}", f"{r.seg_snr:.6f}"])
        return buf.getvalue()

    def to_json(self):
        records = [dict(asdict(r), llr=round(r.llr, 6), seg_snr=round(r.seg_snr, 6))
                   for r in self.rows]
        return json.dumps(records, indent=2) + "\n"

    def write(self, csv_path=None, json_path=None):
        if csv_path is not None:
            Path(csv_path).write_text(self.to_csv(), encoding="utf-8", newline="\n")
        if json_path is not None:
            Path(json_path).write_text(self.to_json(), encoding="utf-8", newline="\n")

    @classmethod
    def from_csv(cls, text):
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != FIELDS:
            raise InvalidParameter(f"expected header {','.join(FIELDS)}, got {reader.fieldnames}")
        report = cls()
        for rec in reader:
            report.add(ReportRow(rec["noise_type"], float(rec["snr_db"]), rec["method"],
                                 float(rec["llr"]), float(rec["seg_snr"])))
        return report

    def conditions(self):
        seen = []
        for r in self.rows:
            if (r.noise_type, r.snr_db) not in seen:
                seen.append((r.noise_type, r.snr_db))
        return seen

    def format_table(self):
        """Text table: noise type, SNR, WAT-LLR, SR-LLR, WAT-segSNR, SR-segSNR."""
        header = ("noise", "snr_db", "WAT-LLR", "SR-LLR", "WAT-segSNR", "SR-segSNR")
        lines = ["{:<10}{:>8}{:>12}{:>12}{:>12}{:>12}".format(*header)]
        by_key = {r.key: r for r in self.rows}

        def cell(nt, snr, method, attr):
            r = by_key.get((nt, snr, method))
            return f"{getattr(r, attr):.6f}" if r else "-"

        for nt, snr in self.conditions():
            lines.append("{:<10}{:>8}{:>12}{:>12}{:>12}{:>12}".format(
                nt, f"{snr:g}",
                cell(nt, snr, "WAT", "llr"), cell(nt, snr, "SR", "llr"),
                cell(nt, snr, "WAT", "seg_snr"), cell(nt, snr, "SR", "seg_snr")))
        return "\n".join(lines) + "\n"


def load_reference_table() -> MetricsReport:
    """Reference SR/WAT comparison figures, kept verbatim for format checks."""
    text = resources.files("srenhance").joinpath("data/reference_comparison.csv").read_text("utf-8")
    return MetricsReport.from_csv(text)


@dataclass(frozen=True)
class Condition:
    clean: object          # path or Waveform
    noise: object          # path or Waveform
    snr_db: float
    noise_type: str
    seed: int | None = None

    def describe(self, index=None):
        where = f"row {index} " if index is not None else ""
        return f"{where}({self.noise_type}, {self.snr_db:g} dB, noise={self.noise})"


def read_manifest(path):
    """Parse a manifest CSV with columns clean,noise,snr_db,noise_type[,seed].

    Relative paths are resolved against the manifest's directory.
    """
    path = Path(path)
    base = path.parent
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(line for line in f if not line.lstrip().startswith("#"))
        names = reader.fieldnames or []
        missing = [c for c in MANIFEST_FIELDS if c not in names]
        if names and missing:
            raise InvalidParameter(f"{path}: manifest lacks columns {missing}")
        out = []
        for i, rec in enumerate(reader, start=1):
            try:
                snr = float(rec["snr_db"])
                seed = int(rec["seed"]) if rec.get("seed") not in (None, "") else None
            except ValueError as e:
                raise InvalidParameter(f"{path}: row {i}: {e}") from None
            out.append(Condition(base / rec["clean"], base / rec["noise"], snr,
                                 rec["noise_type"], seed))
    return out


def _load(src):
    return src if isinstance(src, Waveform) else read_wav(src)


def _fit_length(wave, n):
    x = np.zeros(n)
    k = min(n, len(wave))
    x[:k] = wave.samples[:k]
    return Waveform(x, wave.sample_rate_hz)


def evaluate_condition(cond: Condition, methods=("wat", "sr"), cfg=EnhanceConfig(),
                       metric_params=MetricParams(), random_offset=False, seed=None):
    """Mix, enhance with each method and score; one row per method."""
    clean = _load(cond.clean)
    noise = _load(cond.noise)
    seed = cond.seed if seed is None else seed
    noisy = mix_at_snr(clean, noise, cond.snr_db, random_offset=random_offset, seed=seed)
    rows = []
    for method in methods:
        out = enhance(noisy, replace(cfg, method=method)).wave
        enhanced = _fit_length(out, len(clean))
        rows.append(ReportRow(cond.noise_type, cond.snr_db, method.upper(),
                              llr(clean, enhanced, metric_params),
                              segmental_snr(clean, enhanced, metric_params)))
    return rows


def build_report(conditions, methods=("wat", "sr"), cfg=EnhanceConfig(),
                 metric_params=MetricParams(), random_offset=False, seed=None,
                 workers=1) -> MetricsReport:
    """Evaluate every condition; rows follow condition order, then method order.

    ``seed`` overrides per-condition seeds (they only matter with
    ``random_offset``). Errors are re-raised with the failing condition named.
    """
    conditions = list(conditions)

    def run(indexed):
        i, cond = indexed
        try:
            return evaluate_condition(cond, methods, cfg, metric_params, random_offset, seed)
        except SrEnhanceError as e:
            raise type(e)(f"{cond.describe(i)}: {e}") from e
        except OSError as e:
            raise SrEnhanceError(f"{cond.describe(i)}: {e}") from e

    jobs = list(enumerate(conditions, start=1))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    report = MetricsReport()
    for rows in results:
        for row in rows:
            report.add(row)
    return report


def seed_from_env(default=None):
    value = os.environ.get("SR_ENHANCE_SEED")
    if value in (None, ""):
        return default
    try:
        return int(value)
    except ValueError:
        raise InvalidParameter(f"SR_ENHANCE_SEED must be an integer, got {value!r}") from None

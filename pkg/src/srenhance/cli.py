"""Command-line front end.

Exit codes: 0 ok, 2 missing input, 3 invalid parameter, 4 signal contract
violation, 1 anything else.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import synth
from .audio_io import mix_at_snr, read_wav, write_wav
from .config import RunConfig
from .enhancer import enhance
from .errors import InvalidParameter, SrEnhanceError
from .report import build_report, read_manifest, seed_from_env
from .stft import stft
from .viz import spectrogram_raster, write_pgm


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(InvalidParameter.exit_code, f"{self.prog}: error: {message}\n")


def _load_config(path):
    return RunConfig.load(path) if path else RunConfig()


def cmd_mix(args):
    clean = read_wav(args.clean)
    noise = read_wav(args.noise)
    cfg = _load_config(args.config)
    seed = seed_from_env(args.seed if args.seed is not None else cfg.run.seed)
    random_offset = args.random_offset or cfg.run.random_offset
    noisy = mix_at_snr(clean, noise, args.snr_db, random_offset=random_offset, seed=seed)
    write_wav(noisy, args.out)
    return 0


def cmd_enhance(args):
    cfg = _load_config(args.config)
    method = args.method or cfg.enhance.method
    result = enhance(read_wav(args.input), cfg.with_method(method).enhance)
    write_wav(result.wave, args.out)
    if args.trace:
        rows = result.trace_rows()
        with open(args.trace, "w", newline="", encoding="utf-8") as f:
            fieldnames = list(rows[0]) if rows else ["frame"]
            w = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
            w.writeheader()
            for row in rows:
                w.writerow({k: (f"{v:.9g}" if isinstance(v, float) else v) for k, v in row.items()})
    return 0


def cmd_eval(args):
    cfg = _load_config(args.config)
    conditions = read_manifest(args.manifest)
    seed = seed_from_env(cfg.run.seed)
    report = build_report(conditions, ("wat", "sr"), cfg.enhance, cfg.metrics,
                          random_offset=cfg.run.random_offset, seed=seed,
                          workers=args.workers or cfg.run.workers)
    report.write(args.out_csv, args.out_json)
    sys.stdout.write(report.format_table())
    return 0


def cmd_spectrogram(args):
    cfg = _load_config(args.config)
    dyn = args.dyn_range if args.dyn_range is not None else cfg.run.dyn_range_db
    if dyn <= 0:
        raise InvalidParameter(f"--dyn-range must be positive, got {dyn}")
    raster = spectrogram_raster(stft(read_wav(args.input), cfg.stft), dyn)
    write_pgm(raster, args.out)
    return 0


def cmd_make_corpus(args):
    """Write a synthetic clean signal, three noises and a 3 x 4 manifest."""
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = seed_from_env(args.seed)
    write_wav(synth.speech_like(args.duration, seed=seed), out / "clean.wav")
    rows = []
    for i, kind in enumerate(synth.NOISE_TYPES):
        write_wav(synth.noise(kind, args.duration + 1.0, seed=seed + 1 + i), out / f"{kind}.wav")
        for snr in (0, 5, 10, 15):
            rows.append(("clean.wav", f"{kind}.wav", snr, kind.upper()))
    with open(out / "manifest.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(("clean", "noise", "snr_db", "noise_type"))
        w.writerows(rows)
    return 0


def build_parser():
    p = _Parser(prog="srenhance", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("mix", help="add noise to clean speech at a global SNR")
    s.add_argument("clean")
    s.add_argument("noise")
    s.add_argument("snr_db", type=float)
    s.add_argument("out")
    s.add_argument("--random-offset", action="store_true",
                   help="start the noise at a seeded random offset")
    s.add_argument("--seed", type=int)
    s.add_argument("--config")
    s.set_defaults(func=cmd_mix)

    s = sub.add_parser("enhance", help="enhance a noisy WAV")
    s.add_argument("input")
    s.add_argument("out")
    s.add_argument("--method", choices=("sr", "wat"))
    s.add_argument("--config")
    s.add_argument("--trace", help="per-frame CSV: class, mean noise PSD, presence, gain")
    s.set_defaults(func=cmd_enhance)

    s = sub.add_parser("eval", help="evaluate SR and WAT over a manifest")
    s.add_argument("manifest")
    s.add_argument("out_csv")
    s.add_argument("out_json")
    s.add_argument("--config")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("spectrogram", help="render a spectrogram as binary PGM")
    s.add_argument("input")
    s.add_argument("out")
    s.add_argument("--dyn-range", type=float, help="dB below peak mapped to black (default 60)")
    s.add_argument("--config")
    s.set_defaults(func=cmd_spectrogram)

    s = sub.add_parser("make-corpus", help="write a synthetic evaluation corpus")
    s.add_argument("out_dir")
    s.add_argument("--duration", type=float, default=3.0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_make_corpus)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SrEnhanceError as e:
        print(f"srenhance: {e}", file=sys.stderr)
        return e.exit_code
    except FileNotFoundError as e:
        print(f"srenhance: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - last-resort mapping to exit 1
        print(f"srenhance: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

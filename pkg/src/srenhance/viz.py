"""Grayscale spectrogram rasters written as binary PGM."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import EmptyMatrix, InvalidParameter, SrEnhanceError
from .stft import StftMatrix

MAG_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class Raster:
    """8-bit grayscale image, row-major, top row = highest frequency."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.size != self.width * self.height:
            raise InvalidParameter(
                f"{px.size} pixels for a {self.width}x{self.height} raster")
        if px.size and (px.min() < 0 or px.max() > 255):
            raise InvalidParameter("pixel values must lie in 0..255")
        object.__setattr__(self, "pixels", px.astype(np.uint8).reshape(self.height, self.width))


def spectrogram_raster(mat: StftMatrix, dyn_range_db=60.0) -> Raster:
    """Map magnitude in dB linearly onto 0..255 over ``dyn_range_db`` below the peak.

    An all-zero matrix renders black.
    """
    if dyn_range_db <= 0:
        raise InvalidParameter(f"dyn_range_db must be positive, got {dyn_range_db}")
    if mat.n_frames == 0:
        raise EmptyMatrix("no frames to render")
    mag = np.abs(mat.frames)
    n_frames, n_bins = mag.shape
    if not mag.max() > 0:
        return Raster(n_frames, n_bins, np.zeros((n_bins, n_frames), dtype=np.uint8))
    db = 20.0 * np.log10(mag + MAG_FLOOR)
    level = 255.0 * (db - (db.max() - dyn_range_db)) / dyn_range_db
    # round half away from zero; values are non-negative after clipping
    pixels = np.floor(np.clip(level, 0.0, 255.0) + 0.5)
    # rows: frequency descending; columns: time
    return Raster(n_frames, n_bins, pixels.T[::-1])


def pgm_bytes(r: Raster) -> bytes:
    return f"P5\n{r.width} {r.height}\n255\n".encode("ascii") + r.pixels.tobytes()


def write_pgm(r: Raster, path) -> None:
    try:
        with open(os.fspath(path), "wb") as f:
            f.write(pgm_bytes(r))
    except OSError as e:
        raise SrEnhanceError(f"cannot write {path}: {e}") from e


def read_pgm(path) -> Raster:
    """Parse a binary PGM with maxval 255 (the format :func:`write_pgm` emits)."""
    with open(os.fspath(path), "rb") as f:
        data = f.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic != b"P5" or maxval != 255:
        raise InvalidParameter(f"unsupported PGM: magic={magic!r} maxval={maxval}")
    pixels = np.frombuffer(data[pos + 1:pos + 1 + w * h], dtype=np.uint8)
    return Raster(w, h, pixels)

"""8-bit grayscale PGM rendering of gathers, error panels and FK spectra."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..metrics import fk_spectrum

FK_FLOOR_DB = -80.0


def to_gray(image, lo_pct: float = 1.0, hi_pct: float = 99.0) -> np.ndarray:
    """Clip at the given percentiles and map linearly to 0..255."""
    img = np.asarray(image, dtype=np.float64)
    lo, hi = np.percentile(img, [lo_pct, hi_pct])
    if not hi > lo:
        return np.full(img.shape, 128, dtype=np.uint8)
    scaled = (np.clip(img, lo, hi) - lo) / (hi - lo)
    return np.rint(scaled * 255.0).astype(np.uint8)


def fk_gray(shot, dt: float, dg: float) -> np.ndarray:
    """Log-magnitude FK panel, ``FK_FLOOR_DB`` .. 0 dB mapped to 0..255."""
    db = fk_spectrum(shot, dt, dg).to_db(FK_FLOOR_DB)
    return np.rint((db - FK_FLOOR_DB) / -FK_FLOOR_DB * 255.0).astype(np.uint8)


def pgm_bytes(gray: np.ndarray) -> bytes:
    gray = np.asarray(gray, dtype=np.uint8)
    if gray.ndim != 2:
        raise ValueError("PGM needs a 2D image")
    h, w = gray.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(gray).tobytes()


def write_pgm(path, gray: np.ndarray) -> None:
    Path(path).write_bytes(pgm_bytes(gray))


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5" or parts[2] != b"255":
        raise ValueError("not an 8-bit binary PGM")
    w, h = (int(x) for x in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8, count=w * h).reshape(h, w)


def render(shot, mode: str = "shot", truth=None, dt: float = 1.0, dg: float = 1.0) -> np.ndarray:
    """Gray image for ``mode`` in {"shot", "error", "fk"}; rows are time or frequency."""
    shot = np.asarray(shot, dtype=np.float64)
    if mode == "shot":
        return to_gray(shot)
    if mode == "error":
        if truth is None:
            raise ValueError("error mode needs the ground-truth shot")
        return to_gray(np.abs(np.asarray(truth, dtype=np.float64) - shot))
    if mode == "fk":
        return fk_gray(shot, dt, dg)
    raise ValueError(f"unknown render mode {mode!r}")

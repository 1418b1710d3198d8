"""
Kinematic cross-spread synthetics.

Receivers sit on a line along ``x``; sources sit on an orthogonal line
crossing it at ``x = source_line_offset``. A source at position ``s`` along
its line and a receiver at ``g`` are separated by
``hypot(g - source_line_offset, s)``. Every event adds a Ricker wavelet
at its traveltime for that offset.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .survey import SeismicCube, SurveyGeometry

EVENT_KINDS = ("linear", "hyperbolic")


@dataclass(frozen=True)
class EventSpec:
    """A linear (direct/refracted) or hyperbolic (reflected) arrival."""

    kind: str
    t0: float
    velocity: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"event kind must be one of {EVENT_KINDS}, got {self.kind!r}")
        if not self.velocity > 0:
            raise ValueError("event velocity must be positive")
        if not self.t0 >= 0:
            raise ValueError("event t0 must be non-negative")


@dataclass(frozen=True)
class WaveletSpec:
    dominant_frequency: float = 20.0
    support_halfwidth: float = 0.1

    def __post_init__(self):
        if not self.dominant_frequency > 0 or not self.support_halfwidth > 0:
            raise ValueError("wavelet frequency and half-width must be positive")


def ricker_value(t, f: float):
    """Closed-form Ricker wavelet ``(1 - 2 a) exp(-a)`` with ``a = (pi f t)^2``."""
    a = (np.pi * f * np.asarray(t, dtype=np.float64)) ** 2
    return (1.0 - 2.0 * a) * np.exp(-a)


def ricker(spec: WaveletSpec, dt: float) -> np.ndarray:
    """
    Ricker wavelet sampled every ``dt`` on ``[-halfwidth, +halfwidth]``.

    The result has odd length, is symmetric and peaks at 1 in the middle.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if spec.support_halfwidth < dt:
        raise ValueError("wavelet half-width must be at least one sample")
    half = int(np.floor(spec.support_halfwidth / dt + 1e-9))
    t = np.arange(-half, half + 1) * dt
    return ricker_value(t, spec.dominant_frequency)


def traveltime(event: EventSpec, offset):
    """Arrival time in seconds at the given source-receiver offset(s)."""
    offset = np.asarray(offset, dtype=np.float64)
    if np.any(offset < 0):
        raise ValueError("offset must be non-negative")
    if event.kind == "linear":
        out = event.t0 + offset / event.velocity
    else:
        out = np.sqrt(event.t0 ** 2 + (offset / event.velocity) ** 2)
    return float(out) if out.ndim == 0 else out


def cross_spread_offsets(geometry: SurveyGeometry, source_line_offset: float = 0.0) -> np.ndarray:
    """``(n, k)`` source-receiver distances for the cross-spread layout."""
    dx = geometry.receiver_axis[:, None] - source_line_offset
    dy = geometry.source_axis[None, :]
    return np.hypot(dx, dy)


def _inject(trace: np.ndarray, wavelet: np.ndarray, position: float, amplitude: float):
    """Add ``amplitude * wavelet`` centred at fractional sample ``position``,
    split between the two nearest integer placements."""
    m = trace.size
    half = wavelet.size // 2
    i0 = int(np.floor(position))
    frac = position - i0
    for shift, weight in ((i0, 1.0 - frac), (i0 + 1, frac)):
        if weight == 0.0:
            continue
        lo = shift - half
        hi = lo + wavelet.size
        a, b = max(lo, 0), min(hi, m)
        if a >= b:
            continue
        trace[a:b] += (amplitude * weight) * wavelet[a - lo : b - lo]


def synthesize(
    geometry: SurveyGeometry,
    events: Sequence[EventSpec],
    wavelet: WaveletSpec = WaveletSpec(),
    source_line_offset: float = 0.0,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> SeismicCube:
    """
    Convolutional synthetic for every (receiver, shot) pair of ``geometry``.

    Energy falling outside the time axis is dropped. With
    ``noise_sigma > 0`` zero-mean Gaussian noise drawn from ``seed`` is added.
    """
    events = list(events)
    if not events:
        raise ValueError("at least one event is required")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    m, n, k = geometry.shape
    dt = geometry.dt
    t_first = geometry.time_axis[0]
    w = ricker(wavelet, dt)
    half = w.size // 2
    offsets = cross_spread_offsets(geometry, source_line_offset)
    data = np.zeros((m, n, k))
    for ev in events:
        if ev.amplitude == 0.0:
            continue
        arrivals = (np.asarray(traveltime(ev, offsets)) - t_first) / dt
        for j in range(k):
            for i in range(n):
                pos = arrivals[i, j]
                if pos - half >= m or pos + half + 1 < 0:
                    continue
                _inject(data[:, i, j], w, pos, ev.amplitude)
    if noise_sigma > 0:
        data += np.random.default_rng(seed).normal(0.0, noise_sigma, size=data.shape)
    return SeismicCube(data)


def read_events(lines: Iterable[str]) -> list:
    """Parse ``kind,t0,velocity,amplitude`` rows; blank lines, ``#`` comments
    and a header row are skipped."""
    events = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if parts[0] == "kind":
            continue
        if len(parts) != 4:
            raise ValueError(f"event row needs 4 fields: {raw!r}")
        events.append(EventSpec(parts[0], float(parts[1]), float(parts[2]), float(parts[3])))
    return events


def format_events(events: Sequence[EventSpec]) -> str:
    rows = ["kind,t0,velocity,amplitude"]
    rows += [f"{e.kind},{e.t0!r},{e.velocity!r},{e.amplitude!r}" for e in events]
    return "\n".join(rows) + "\n"

"""
Cross-spread survey data model.

A survey is an ``(m, n, k)`` amplitude cube indexed (time, receiver, shot),
a geometry giving the physical position of every sample along the three
axes, and a mask listing which shots were not acquired. The acquisition
operator keeps the acquired shot gathers and drops the rest; the neural
field is trained on coordinates and amplitudes rescaled to ``[0, 1]``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import DegenerateRangeError, DimensionError, EmptyQueryError

__all__ = [
    "SurveyGeometry",
    "SeismicCube",
    "SamplingMask",
    "CoordinateSamples",
    "Normalizer",
    "apply_forward",
    "build_normalizer",
    "extract_samples",
    "coordinates_for_missing",
    "assemble",
]


def _frozen_axis(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).ravel()
    if arr.size < 2:
        raise ValueError(f"{name} needs at least 2 samples, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if not np.all(np.diff(arr) > 0):
        raise ValueError(f"{name} must be strictly increasing")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SurveyGeometry:
    """
    Physical axes of a cross-spread.

    Attributes:
        time_axis: sample times in seconds, uniform step
        receiver_axis: receiver positions along the receiver line, meters
        source_axis: source positions along the source line, meters;
            may be irregularly spaced
    """

    time_axis: np.ndarray
    receiver_axis: np.ndarray
    source_axis: np.ndarray

    def __post_init__(self):
        t = _frozen_axis(self.time_axis, "time_axis")
        steps = np.diff(t)
        dt = steps[0]
        if np.max(np.abs(steps - dt)) >= 1e-9 * dt:
            raise ValueError("time_axis must be uniformly sampled")
        object.__setattr__(self, "time_axis", t)
        object.__setattr__(self, "receiver_axis", _frozen_axis(self.receiver_axis, "receiver_axis"))
        object.__setattr__(self, "source_axis", _frozen_axis(self.source_axis, "source_axis"))

    @classmethod
    def regular_time(cls, dt: float, m: int, receivers, sources, t0: float = 0.0) -> "SurveyGeometry":
        """Build a geometry whose time axis is ``t0 + dt * arange(m)``."""
        return cls(t0 + dt * np.arange(m), receivers, sources)

    @property
    def dt(self) -> float:
        return float(self.time_axis[1] - self.time_axis[0])

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.time_axis.size, self.receiver_axis.size, self.source_axis.size)

    @property
    def axes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.time_axis, self.receiver_axis, self.source_axis)

    def fingerprint(self) -> str:
        """SHA-256 over the three axes; identifies the survey a model was fit on."""
        h = hashlib.sha256()
        for axis in self.axes:
            h.update(np.uint32(axis.size).tobytes())
            h.update(axis.astype("<f8").tobytes())
        return h.hexdigest()

    def __eq__(self, other):
        if not isinstance(other, SurveyGeometry):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.axes, other.axes))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SeismicCube:
    """
    Amplitude tensor indexed ``[time, receiver, shot]``.

    On disk and when flattened to samples, time varies fastest, then
    receiver, then shot (Fortran order of ``data``).
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise DimensionError(f"cube must be 3D (time, receiver, shot), got shape {arr.shape}")
        if arr.size == 0:
            raise DimensionError("cube is empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("cube contains non-finite amplitudes")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def k(self) -> int:
        return self.data.shape[2]

    def shot(self, j: int) -> np.ndarray:
        return self.data[:, :, j]

    def __eq__(self, other):
        if not isinstance(other, SeismicCube):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None


@dataclass(frozen=True)
class SamplingMask:
    """Indices (0-based, sorted) of shots missing from a ``total_shots`` survey."""

    total_shots: int
    missing: Tuple[int, ...] = ()

    def __post_init__(self):
        k = int(self.total_shots)
        idx = [int(i) for i in self.missing]
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate missing shot index in {idx}")
        bad = [i for i in idx if i < 0 or i >= k]
        if bad:
            raise ValueError(f"missing shot indices {bad} outside [0, {k})")
        if len(idx) >= k:
            raise ValueError("at least one shot must be observed")
        object.__setattr__(self, "total_shots", k)
        object.__setattr__(self, "missing", tuple(sorted(idx)))

    @classmethod
    def from_indices(cls, total_shots: int, missing: Iterable[int]) -> "SamplingMask":
        return cls(total_shots, tuple(missing))

    @property
    def s(self) -> int:
        return len(self.missing)

    @property
    def observed(self) -> Tuple[int, ...]:
        gone = set(self.missing)
        return tuple(j for j in range(self.total_shots) if j not in gone)

    def selection(self) -> np.ndarray:
        """Boolean vector over shots, True where acquired (the diagonal of S^T S)."""
        keep = np.ones(self.total_shots, dtype=bool)
        keep[list(self.missing)] = False
        return keep


@dataclass(frozen=True, eq=False)
class CoordinateSamples:
    """
    Training pairs for the neural field.

    ``v`` has shape ``(N, 3)`` with normalized (time, receiver, shot)
    coordinates; ``r`` has shape ``(N,)`` with normalized amplitudes.
    """

    v: np.ndarray
    r: np.ndarray

    def __len__(self) -> int:
        return self.r.shape[0]


@dataclass(frozen=True)
class Normalizer:
    """Min-max maps between physical/data units and ``[0, 1]``."""

    coord_min: Tuple[float, float, float]
    coord_max: Tuple[float, float, float]
    amp_min: float
    amp_max: float

    def __post_init__(self):
        lo = tuple(float(x) for x in self.coord_min)
        hi = tuple(float(x) for x in self.coord_max)
        if len(lo) != 3 or len(hi) != 3:
            raise DimensionError("coordinate bounds need exactly 3 axes")
        for axis, (a, b) in enumerate(zip(lo, hi)):
            if not b > a:
                raise DegenerateRangeError(f"coordinate axis {axis} has max <= min ({a}, {b})")
        if not float(self.amp_max) > float(self.amp_min):
            raise DegenerateRangeError(
                f"amplitude range is degenerate ({self.amp_min}, {self.amp_max})"
            )
        object.__setattr__(self, "coord_min", lo)
        object.__setattr__(self, "coord_max", hi)
        object.__setattr__(self, "amp_min", float(self.amp_min))
        object.__setattr__(self, "amp_max", float(self.amp_max))

    def normalize_coords(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=np.float64)
        lo = np.asarray(self.coord_min)
        return (c - lo) / (np.asarray(self.coord_max) - lo)

    def denormalize_coords(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        lo = np.asarray(self.coord_min)
        return lo + v * (np.asarray(self.coord_max) - lo)

    def normalize_axis(self, values, axis: int) -> np.ndarray:
        lo, hi = self.coord_min[axis], self.coord_max[axis]
        return (np.asarray(values, dtype=np.float64) - lo) / (hi - lo)

    def normalize_amplitude(self, a) -> np.ndarray:
        return (np.asarray(a, dtype=np.float64) - self.amp_min) / (self.amp_max - self.amp_min)

    def denormalize_amplitude(self, r) -> np.ndarray:
        return self.amp_min + np.asarray(r, dtype=np.float64) * (self.amp_max - self.amp_min)

    def as_array(self) -> np.ndarray:
        """The 8 constants in checkpoint order: 3 mins, 3 maxes, amp min, amp max."""
        return np.array([*self.coord_min, *self.coord_max, self.amp_min, self.amp_max])

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "Normalizer":
        v = [float(x) for x in values]
        if len(v) != 8:
            raise DimensionError(f"expected 8 normalizer constants, got {len(v)}")
        return cls(tuple(v[0:3]), tuple(v[3:6]), v[6], v[7])


def _check_mask(cube_shots: int, mask: SamplingMask, expect_observed: bool):
    want = mask.total_shots - mask.s if expect_observed else mask.total_shots
    if cube_shots != want:
        kind = "observed" if expect_observed else "full"
        raise DimensionError(
            f"{kind} cube has {cube_shots} shots but mask implies {want} "
            f"(k={mask.total_shots}, s={mask.s})"
        )


def _check_geometry(geometry: SurveyGeometry, m: int, n: int, k: int):
    if geometry.shape != (m, n, k):
        raise DimensionError(f"geometry shape {geometry.shape} does not match cube ({m}, {n}, {k})")


def apply_forward(cube: SeismicCube, mask: SamplingMask) -> SeismicCube:
    """Acquisition operator without noise: keep only the acquired shot gathers."""
    _check_mask(cube.k, mask, expect_observed=False)
    if mask.s == 0:
        return cube
    return SeismicCube(cube.data[:, :, list(mask.observed)])


def build_normalizer(geometry: SurveyGeometry, observed: SeismicCube) -> Normalizer:
    """
    Coordinate bounds come from the full geometry, so missing-shot
    positions still land inside ``[0, 1]``; amplitude bounds are the
    global extrema of the acquired data.
    """
    lo = tuple(float(a[0]) for a in geometry.axes)
    hi = tuple(float(a[-1]) for a in geometry.axes)
    return Normalizer(lo, hi, float(observed.data.min()), float(observed.data.max()))


def _grid(t: np.ndarray, g: np.ndarray, s: np.ndarray) -> np.ndarray:
    # time fastest, then receiver, then shot
    T, G, S = np.meshgrid(t, g, s, indexing="ij")
    return np.stack([T.ravel(order="F"), G.ravel(order="F"), S.ravel(order="F")], axis=1)


def _clip_unit(v: np.ndarray) -> np.ndarray:
    # endpoints can miss 0/1 by an ulp after the affine map
    return np.clip(v, 0.0, 1.0)


def extract_samples(
    observed: SeismicCube, geometry: SurveyGeometry, mask: SamplingMask, norm: Normalizer
) -> CoordinateSamples:
    """All ``m * n * (k - s)`` acquired samples as normalized coordinate/amplitude pairs."""
    _check_mask(observed.k, mask, expect_observed=True)
    _check_geometry(geometry, observed.m, observed.n, mask.total_shots)
    t = norm.normalize_axis(geometry.time_axis, 0)
    g = norm.normalize_axis(geometry.receiver_axis, 1)
    s = norm.normalize_axis(geometry.source_axis[list(mask.observed)], 2)
    v = _clip_unit(_grid(t, g, s))
    r = _clip_unit(norm.normalize_amplitude(observed.data.ravel(order="F")))
    return CoordinateSamples(v, r)


def coordinates_for_missing(
    geometry: SurveyGeometry, mask: SamplingMask, norm: Normalizer
) -> np.ndarray:
    """Normalized query coordinates ``(m * n * s, 3)`` of every missing shot gather."""
    if mask.s == 0:
        raise EmptyQueryError("no missing shots to query")
    if geometry.shape[2] != mask.total_shots:
        raise DimensionError("geometry and mask disagree on shot count")
    t = norm.normalize_axis(geometry.time_axis, 0)
    g = norm.normalize_axis(geometry.receiver_axis, 1)
    s = norm.normalize_axis(geometry.source_axis[list(mask.missing)], 2)
    return _clip_unit(_grid(t, g, s))


def assemble(observed: SeismicCube, predicted_missing, mask: SamplingMask) -> SeismicCube:
    """
    Interleave acquired shots and predicted gathers into a full cube.

    ``predicted_missing`` is an ``(m, n, s)`` array whose last index follows
    ``mask.missing``. Acquired shots are copied bit-for-bit.
    """
    _check_mask(observed.k, mask, expect_observed=True)
    pred = np.asarray(predicted_missing, dtype=np.float64)
    if mask.s == 0:
        if pred.size:
            raise DimensionError("predictions given for a mask with no missing shots")
        return observed
    if pred.shape != (observed.m, observed.n, mask.s):
        raise DimensionError(
            f"predicted gathers have shape {pred.shape}, expected {(observed.m, observed.n, mask.s)}"
        )
    out = np.empty((observed.m, observed.n, mask.total_shots))
    out[:, :, list(mask.observed)] = observed.data
    out[:, :, list(mask.missing)] = pred
    return SeismicCube(out)

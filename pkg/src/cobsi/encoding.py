"""
Anisotropic positional encoding of normalized survey coordinates.

Each axis value ``v`` in ``[0, 1]`` is expanded into
``[cos(w_1 v), sin(w_1 v), ..., cos(w_U v), sin(w_U v)]`` with either
linear (``w_i = i*pi/2``) or exponential (``w_i = pi * 2**(i-1)``)
frequencies. Time, receiver and shot axes each get their own count
``M``, ``N``, ``K`` and the three blocks are concatenated in that order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

SAMPLINGS = ("linear", "exponential")


@dataclass(frozen=True)
class EncodingSpec:
    M: int
    N: int
    K: int
    sampling: str = "linear"

    def __post_init__(self):
        for name in ("M", "N", "K"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.sampling not in SAMPLINGS:
            raise ValueError(f"sampling must be one of {SAMPLINGS}, got {self.sampling!r}")

    @property
    def dim(self) -> int:
        """Length of the encoded vector, ``2 (M + N + K)``."""
        return 2 * (self.M + self.N + self.K)

    @property
    def counts(self):
        return (self.M, self.N, self.K)

    @classmethod
    def parse(cls, text: str, sampling: str = "linear") -> "EncodingSpec":
        """``"121"`` or ``"9,5,8"`` -> EncodingSpec; single digits may be run together."""
        parts = text.split(",") if "," in text else list(text)
        if len(parts) != 3:
            raise ValueError(f"cannot read three frequency counts from {text!r}")
        return cls(*(int(p) for p in parts), sampling=sampling)


def frequencies(U: int, sampling: str = "linear") -> np.ndarray:
    """Angular frequencies ``w_1 .. w_U`` for the chosen sampling."""
    if U < 1:
        raise ValueError("U must be >= 1")
    i = np.arange(1, U + 1, dtype=np.float64)
    if sampling == "linear":
        return i * np.pi / 2
    if sampling == "exponential":
        return np.pi * 2.0 ** (i - 1)
    raise ValueError(f"unknown sampling {sampling!r}")


def _check_domain(v: np.ndarray):
    if not np.all((v >= 0.0) & (v <= 1.0)):
        bad = v[~((v >= 0.0) & (v <= 1.0))]
        raise DomainError(f"coordinates must lie in [0, 1]; got e.g. {bad.flat[0]!r}")


def encode_axis(v, U: int, sampling: str = "linear") -> np.ndarray:
    """
    Encode one coordinate axis.

    ``v`` may be a scalar or an array; the output gains a trailing axis of
    length ``2U`` with cos/sin interleaved per frequency.
    """
    v = np.asarray(v, dtype=np.float64)
    _check_domain(v)
    angles = v[..., None] * frequencies(U, sampling)
    out = np.empty(v.shape + (2 * U,))
    out[..., 0::2] = np.cos(angles)
    out[..., 1::2] = np.sin(angles)
    return out


def encode(v, spec: EncodingSpec) -> np.ndarray:
    """Encode ``(..., 3)`` normalized (time, receiver, shot) triples into ``(..., spec.dim)``."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1:] != (3,):
        raise DimensionError(f"expected trailing axis of length 3, got shape {v.shape}")
    blocks = [
        encode_axis(v[..., axis], count, spec.sampling)
        for axis, count in enumerate(spec.counts)
    ]
    return np.concatenate(blocks, axis=-1)

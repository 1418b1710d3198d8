"""
F-XY multichannel singular spectrum analysis with iterative reinsertion.

Every temporal-frequency slice of the (receiver, shot) grid is embedded in
a block Hankel matrix, reduced to low rank (optionally with damping),
averaged back along its anti-diagonals, and the acquired shots are
reinserted. The shot axis is treated as a regular index grid.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from ..errors import DimensionError
from ..survey import SamplingMask, SeismicCube, SurveyGeometry


@dataclass(frozen=True)
class MssaConfig:
    """
    ``damping`` is the DMSSA exponent; 0 gives plain MSSA. ``fmax`` (Hz) is
    the highest frequency processed and is clipped to Nyquist.
    """

    rank: int = 3
    damping: int = 0
    iters: int = 50
    fmax: float = 550.0

    def __post_init__(self):
        if self.rank < 1 or self.iters < 1 or not self.fmax > 0 or self.damping < 0:
            raise ValueError(f"invalid MSSA settings {self}")


def default_window(length: int) -> int:
    return length // 2 + 1


def hankelize(d, window: int) -> np.ndarray:
    """``H[i, j] = d[i + j]`` with ``window`` rows."""
    d = np.asarray(d)
    L = d.shape[0]
    if d.ndim != 1 or not 1 <= window <= L:
        raise ValueError(f"window {window} out of range for length {L}")
    i = np.arange(window)[:, None] + np.arange(L - window + 1)[None, :]
    return d[i]


def dehankelize(H) -> np.ndarray:
    """Average the anti-diagonals of ``H`` back into a vector."""
    H = np.asarray(H)
    if H.ndim != 2:
        raise DimensionError("expected a matrix")
    rows, cols = H.shape
    idx = (np.arange(rows)[:, None] + np.arange(cols)[None, :]).ravel()
    counts = np.bincount(idx)
    return _bincount(idx, H.ravel(), rows + cols - 1) / counts


def _bincount(idx, values, size):
    if np.iscomplexobj(values):
        return (np.bincount(idx, values.real, size) + 1j * np.bincount(idx, values.imag, size))
    return np.bincount(idx, values, size)


@lru_cache(maxsize=64)
def _block_index(n: int, k: int, wr: int, ws: int) -> Tuple[np.ndarray, np.ndarray]:
    """Flat (row-major over ``(n, k)``) source index of every block-Hankel entry."""
    qr, qs = n - wr + 1, k - ws + 1
    a = np.arange(ws)[:, None, None, None]
    p = np.arange(wr)[None, :, None, None]
    b = np.arange(qs)[None, None, :, None]
    q = np.arange(qr)[None, None, None, :]
    flat = ((p + q) * k + (a + b)).reshape(ws * wr, qs * qr)
    counts = np.bincount(flat.ravel(), minlength=n * k)
    flat.setflags(write=False)
    counts.setflags(write=False)
    return flat, counts


def _windows(shape, windows):
    n, k = shape
    wr, ws = windows if windows is not None else (default_window(n), default_window(k))
    if not (1 <= wr <= n and 1 <= ws <= k):
        raise ValueError(f"windows {(wr, ws)} out of range for slice {shape}")
    return wr, ws


def block_hankelize(slice2d, windows: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """
    Block Hankel matrix of an ``(n, k)`` receiver-by-shot slice.

    Block ``(a, b)`` is the receiver-axis Hankel matrix of shot ``a + b``;
    ``windows`` is ``(receiver_window, shot_window)``.
    """
    D = np.asarray(slice2d)
    if D.ndim != 2:
        raise DimensionError("expected a 2D slice")
    wr, ws = _windows(D.shape, windows)
    flat, _ = _block_index(D.shape[0], D.shape[1], wr, ws)
    return D.ravel()[flat]


def block_dehankelize(H, shape: Tuple[int, int], windows: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Average every block-Hankel entry back onto its ``(receiver, shot)`` sample."""
    n, k = shape
    wr, ws = _windows(shape, windows)
    flat, counts = _block_index(n, k, wr, ws)
    H = np.asarray(H)
    if H.shape != flat.shape:
        raise DimensionError(f"matrix shape {H.shape} does not match windows, expected {flat.shape}")
    return (_bincount(flat.ravel(), H.ravel(), n * k) / counts).reshape(n, k)


def rank_reduce(A, r: int, damping: int = 0) -> np.ndarray:
    """
    Rank-``r`` truncated SVD of ``A``. With ``damping >= 1`` each kept
    singular value is scaled by ``1 - (s_{r+1} / s_i) ** damping``.

    Only the leading ``r + 1`` singular pairs are needed. Their subspace is
    taken from a partial eigendecomposition of the smaller Gram matrix, and
    an exact SVD of ``A`` restricted to it restores full precision in the
    singular values.
    """
    A = np.asarray(A)
    if r < 1 or r > min(A.shape):
        raise ValueError(f"rank {r} out of range for matrix {A.shape}")
    if damping < 0:
        raise ValueError("damping must be >= 0")
    wide = A.shape[0] < A.shape[1]
    B = A.conj().T if wide else A
    c = B.shape[1]
    top = min(r + 1, c)
    _, V = linalg.eigh(
        B.conj().T @ B, subset_by_index=[c - top, c - 1], driver="evr", check_finite=False
    )
    U, s, Wh = np.linalg.svd(B @ V, full_matrices=False)
    V = V @ Wh.conj().T
    kept = s[:r].copy()
    if damping >= 1 and r < s.size and s[r] > 0:
        kept *= 1.0 - (s[r] / kept) ** damping
    out = (U[:, :r] * kept) @ V[:, :r].conj().T
    return out.conj().T if wide else out


def mssa_slice(
    slice2d,
    keep,
    rank: int,
    damping: int = 0,
    iters: int = 1,
    windows: Optional[Tuple[int, int]] = None,
) -> np.ndarray:
    """
    Reconstruct one frequency slice.

    ``keep`` is a boolean vector over shots; acquired shots are reset to
    their input values after every rank reduction.
    """
    D0 = np.asarray(slice2d)
    keep = np.asarray(keep, dtype=bool)[None, :]
    wr, ws = _windows(D0.shape, windows)
    flat, _ = _block_index(D0.shape[0], D0.shape[1], wr, ws)
    r = min(rank, *flat.shape)
    X = np.where(keep, D0, 0)
    for _ in range(iters):
        R = block_dehankelize(rank_reduce(block_hankelize(X, (wr, ws)), r, damping), D0.shape, (wr, ws))
        X = np.where(keep, D0, R)
    return X


def mssa(
    observed: SeismicCube,
    geometry: SurveyGeometry,
    mask: SamplingMask,
    config: MssaConfig = MssaConfig(),
) -> SeismicCube:
    """
    Fill the missing shots with F-XY (D)MSSA.

    Frequencies above ``min(fmax, Nyquist)`` are left at their zero-filled
    values; acquired shots are restored bit-for-bit in the output.
    """
    if observed.k != mask.total_shots - mask.s:
        raise DimensionError("observed cube does not match the mask")
    if geometry.shape[:2] != observed.shape[:2] or geometry.shape[2] != mask.total_shots:
        raise DimensionError("geometry does not match the observed cube")
    m, n, _ = observed.shape
    k = mask.total_shots
    keep = mask.selection()
    obs_idx = list(mask.observed)
    full = np.zeros((m, n, k))
    full[:, :, obs_idx] = observed.data
    if mask.s == 0:
        return observed

    spec = np.fft.rfft(full, axis=0)
    freqs = np.fft.rfftfreq(m, geometry.dt)
    fmax = min(config.fmax, 0.5 / geometry.dt)
    for b in np.nonzero(freqs <= fmax)[0]:
        spec[b] = mssa_slice(spec[b], keep, config.rank, config.damping, config.iters)
    out = np.fft.irfft(spec, n=m, axis=0)
    out[:, :, obs_idx] = observed.data
    return SeismicCube(out)


DMSSA_DEFAULT = replace(MssaConfig(), damping=3)


def dmssa(observed, geometry, mask, config: MssaConfig = DMSSA_DEFAULT) -> SeismicCube:
    """Damped MSSA; identical to :func:`mssa` when ``config.damping == 0``."""
    return mssa(observed, geometry, mask, config)

"""
Shot-gather quality metrics and frequency-wavenumber spectra.

PSNR and SSIM are evaluated on gathers rescaled by the ground-truth
shot's own min/max, so the peak value is 1 for every shot.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionError

#: convention string written into every report header
METRIC_CONVENTION = "PSNR/SSIM on amplitudes normalized by the ground-truth shot min/max (MAX=1)"

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True, eq=False)
class ShotImage:
    """A gather mapped to ``[0, 1]`` by the min/max ``(lo, hi)`` of a reference shot."""

    values: np.ndarray
    lo: float
    hi: float

    @classmethod
    def reference(cls, shot) -> "ShotImage":
        shot = np.asarray(shot, dtype=np.float64)
        lo, hi = float(shot.min()), float(shot.max())
        return cls(_scale(shot, lo, hi), lo, hi)

    def like(self, shot) -> "ShotImage":
        """Scale another gather with this image's normalization."""
        shot = np.asarray(shot, dtype=np.float64)
        return ShotImage(_scale(shot, self.lo, self.hi), self.lo, self.hi)


def _scale(shot, lo, hi):
    if not np.all(np.isfinite(shot)):
        raise ValueError("shot contains non-finite values")
    span = hi - lo
    # a flat reference keeps its raw offset from lo
    return (shot - lo) / span if span > 0 else shot - lo


def _values(img) -> np.ndarray:
    return img.values if isinstance(img, ShotImage) else np.asarray(img, dtype=np.float64)


def _pair(reference, estimate):
    a, b = _values(reference), _values(estimate)
    if a.shape != b.shape:
        raise DimensionError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(reference, estimate) -> float:
    """``10 log10(1 / MSE)`` for normalized images; ``inf`` when identical."""
    a, b = _pair(reference, estimate)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(1.0 / mse)


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


def _valid_filter(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    out = ndimage.correlate1d(img, taps, axis=0, mode="constant")
    out = ndimage.correlate1d(out, taps, axis=1, mode="constant")
    h = taps.size // 2
    return out[h : img.shape[0] - h, h : img.shape[1] - h]


def ssim_map(reference, estimate, data_range: float = 1.0) -> np.ndarray:
    """
    Local SSIM over every full placement of the Gaussian window.

    For images smaller than 11 pixels along a side the window shrinks to
    the largest odd size that fits (same sigma, renormalized).
    """
    a, b = _pair(reference, estimate)
    if a.ndim != 2:
        raise DimensionError("SSIM expects 2D images")
    size = min(SSIM_WINDOW, *a.shape)
    if size % 2 == 0:
        size -= 1
    taps = _gaussian_window(size, SSIM_SIGMA)
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    mu_a = _valid_filter(a, taps)
    mu_b = _valid_filter(b, taps)
    var_a = _valid_filter(a * a, taps) - mu_a ** 2
    var_b = _valid_filter(b * b, taps) - mu_b ** 2
    cov = _valid_filter(a * b, taps) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return num / den


def ssim(reference, estimate, data_range: float = 1.0) -> float:
    """Mean structural similarity (11x11 Gaussian window, sigma 1.5)."""
    return float(np.mean(ssim_map(reference, estimate, data_range)))


def shot_scores(truth_shot, estimate_shot):
    """``(psnr, ssim)`` of an estimated gather against its ground truth."""
    ref = ShotImage.reference(truth_shot)
    est = ref.like(estimate_shot)
    return psnr(ref, est), ssim(ref, est)


@dataclass(frozen=True, eq=False)
class FkSpectrum:
    """
    Magnitude ``(n_freq, n)`` over non-negative frequencies (Hz) and
    centred wavenumbers (cycles/m).

    The time axis uses ``exp(-i 2 pi f t)`` and the receiver axis
    ``exp(+i 2 pi kx x)``, so ``cos(2 pi (f0 t - k0 x))`` peaks at
    ``(f0, +k0)``.
    """

    magnitude: np.ndarray
    frequencies: np.ndarray
    wavenumbers: np.ndarray
    m: int

    def energy(self) -> float:
        """Sum of squared magnitude over the full two-sided spectrum."""
        w = np.full(self.magnitude.shape[0], 2.0)
        w[0] = 1.0
        if self.m % 2 == 0:
            w[-1] = 1.0
        return float(np.sum(w[:, None] * self.magnitude ** 2))

    def to_db(self, floor_db: float = -80.0) -> np.ndarray:
        """``20 log10(|F| / max|F|)`` floored at ``floor_db``; for display."""
        peak = self.magnitude.max()
        if peak == 0:
            return np.full(self.magnitude.shape, floor_db)
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(self.magnitude / peak)
        return np.maximum(db, floor_db)


def fk_spectrum(shot, dt: float, dg: float) -> FkSpectrum:
    """2D Fourier magnitude of an ``(m, n)`` gather sampled every ``dt`` s and ``dg`` m."""
    shot = _values(shot)
    if shot.ndim != 2 or min(shot.shape) < 2:
        raise DimensionError("FK spectrum needs an (m >= 2, n >= 2) gather")
    m, n = shot.shape
    spec = np.fft.rfft(shot, axis=0)
    spec = np.fft.ifft(spec, axis=1) * n
    spec = np.fft.fftshift(spec, axes=1)
    return FkSpectrum(
        magnitude=np.abs(spec),
        frequencies=np.fft.rfftfreq(m, dt),
        wavenumbers=np.fft.fftshift(np.fft.fftfreq(n, dg)),
        m=m,
    )

"""Orthonormal 3D DCT pair and the l1 proximal map."""
import numpy as np
from scipy import fft


def dct3_forward(cube) -> np.ndarray:
    """Separable orthonormal DCT-II along all three axes."""
    return fft.dctn(np.asarray(cube, dtype=np.float64), type=2, norm="ortho")


def dct3_inverse(coeffs) -> np.ndarray:
    """Inverse of :func:`dct3_forward` (orthonormal DCT-III)."""
    return fft.idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho")


def soft_threshold(x, tau):
    """``sign(x) * max(|x| - tau, 0)``, elementwise."""
    if np.any(np.asarray(tau) < 0):
        raise ValueError("threshold must be non-negative")
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)
    return float(out) if out.ndim == 0 else out

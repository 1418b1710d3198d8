import numpy as np
import pytest
from skimage.metrics import structural_similarity

from cobsi.errors import DimensionError
from cobsi.metrics import ShotImage, fk_spectrum, psnr, shot_scores, ssim


def test_psnr_identical_is_infinite(rng):
    x = rng.random((20, 10))
    assert psnr(x, x) == float("inf")


def test_psnr_uniform_error_hand_values(rng):
    x = rng.random((30, 12))
    assert abs(psnr(x, x + 0.1) - 20.0) < 1e-9
    assert psnr(x, x + 0.05) - psnr(x, x + 0.1) == pytest.approx(10 * np.log10(4), abs=1e-9)


def test_psnr_decreases_with_noise():
    rng = np.random.default_rng(0)
    x = rng.random((64, 32))
    means = []
    for sigma in (0.01, 0.05, 0.1):
        means.append(np.mean([psnr(x, x + rng.normal(0, sigma, x.shape)) for _ in range(100)]))
    assert means[0] > means[1] > means[2]


def test_ssim_identity_and_symmetry(rng):
    x = rng.random((40, 24))
    assert abs(ssim(x, x) - 1.0) <= 1e-12
    for _ in range(5):
        a, b = rng.random((33, 17)), rng.random((33, 17))
        assert abs(ssim(a, b) - ssim(b, a)) <= 1e-12


def test_ssim_constant_images_closed_form():
    a, b = np.full((16, 16), 0.5), np.full((16, 16), 0.25)
    c1, c2 = 1e-4, 9e-4
    expected = (2 * 0.5 * 0.25 + c1) / (0.25 + 0.0625 + c1) * (c2 / c2)
    assert abs(ssim(a, b) - expected) < 1e-6
    assert expected == pytest.approx(0.8003, abs=5e-4)


def test_ssim_matches_scikit_image(rng):
    for shape in [(32, 32), (64, 20), (11, 11)]:
        a = rng.random(shape)
        b = np.clip(a + rng.normal(0, 0.1, shape), 0, 1)
        ref = structural_similarity(
            a, b, data_range=1.0, gaussian_weights=True, sigma=1.5, use_sample_covariance=False
        )
        assert ssim(a, b) == pytest.approx(ref, abs=1e-10)


def test_ssim_bounds_and_identity_only(rng):
    x = rng.random((25, 25))
    for scale in (1e-3, 0.1, 1.0):
        y = x + rng.normal(0, scale, x.shape)
        v = ssim(x, y)
        assert -1.0 <= v < 1.0
    assert ssim(x, -x) >= -1.0


def test_ssim_small_image_window():
    x = np.linspace(0, 1, 28).reshape(4, 7)
    assert ssim(x, x) == pytest.approx(1.0, abs=1e-12)


def test_shape_mismatch():
    with pytest.raises(DimensionError):
        psnr(np.zeros((3, 3)), np.zeros((3, 4)))


def test_shot_scores_normalize_by_truth(rng):
    truth = rng.normal(size=(40, 16)) * 7.0 + 3.0
    p, s = shot_scores(truth, truth)
    assert p == float("inf") and s == pytest.approx(1.0, abs=1e-12)
    ref = ShotImage.reference(truth)
    assert ref.values.min() == 0.0 and ref.values.max() == 1.0
    # an error of 0.1 of the truth's range is 20 dB
    span = truth.max() - truth.min()
    assert shot_scores(truth, truth + 0.1 * span)[0] == pytest.approx(20.0, abs=1e-9)


def test_fk_zero_shot():
    spec = fk_spectrum(np.zeros((16, 8)), 0.004, 10.0)
    assert np.all(spec.magnitude == 0)
    assert spec.magnitude.shape == (9, 8)


@pytest.mark.parametrize("fi,ki", [(5, 2), (12, -3), (3, 0)])
def test_fk_plane_wave_peak(fi, ki):
    m, n, dt, dg = 64, 16, 0.004, 12.5
    f0 = fi / (m * dt)
    k0 = ki / (n * dg)
    t = np.arange(m)[:, None] * dt
    x = np.arange(n)[None, :] * dg
    spec = fk_spectrum(np.cos(2 * np.pi * (f0 * t - k0 * x)), dt, dg)
    i, j = np.unravel_index(np.argmax(spec.magnitude), spec.magnitude.shape)
    assert spec.frequencies[i] == pytest.approx(f0)
    assert spec.wavenumbers[j] == pytest.approx(k0)


@pytest.mark.parametrize("shape", [(32, 8), (33, 9)])
def test_fk_parseval(rng, shape):
    shot = rng.normal(size=shape)
    spec = fk_spectrum(shot, 0.002, 5.0)
    assert np.sum(shot ** 2) == pytest.approx(spec.energy() / (shape[0] * shape[1]), rel=1e-8)
    # cross-check against the full two-sided transform
    full = np.abs(np.fft.fft2(shot)) ** 2
    assert spec.energy() == pytest.approx(full.sum(), rel=1e-10)


def test_fk_translation_covariance(rng):
    shot = rng.normal(size=(40, 12))
    a = fk_spectrum(shot, 0.004, 10.0).magnitude
    b = fk_spectrum(np.roll(shot, 7, axis=0), 0.004, 10.0).magnitude
    assert np.max(np.abs(a - b)) < 1e-10


def test_fk_db_floor():
    spec = fk_spectrum(np.outer(np.hanning(32), np.ones(8)), 0.004, 10.0)
    db = spec.to_db()
    assert db.max() == 0.0 and db.min() >= -80.0

import numpy as np
import pytest

from cobsi.baselines import sbi_admm
from cobsi.encoding import EncodingSpec
from cobsi.errors import DomainError
from cobsi.metrics import fk_spectrum, shot_scores
from cobsi.model import fit, fit_interpolate, interpolate, query
from cobsi.neuralnet import TrainConfig
from cobsi.survey import (
    SamplingMask,
    SeismicCube,
    SurveyGeometry,
    apply_forward,
    build_normalizer,
    extract_samples,
)
from cobsi.synthgen import EventSpec, WaveletSpec, synthesize

from conftest import small_geometry

VELOCITY = 4000.0
DG = 10.0


@pytest.fixture(scope="module")
def hyperbola_case():
    g = SurveyGeometry.regular_time(0.004, 64, (np.arange(16) - 7.5) * DG, np.arange(8) * 40.0)
    cube = synthesize(g, [EventSpec("hyperbolic", 0.08, VELOCITY)], WaveletSpec(15.0, 0.1))
    mask = SamplingMask(8, (3,))
    obs = apply_forward(cube, mask)
    cfg = TrainConfig(learning_rate=3e-3, epochs=300, seed=1)
    model, hist = fit(obs, g, mask, EncodingSpec(2, 2, 1), cfg, width=32, hidden_layers=3)
    return g, cube, mask, obs, model, hist


def tiny_fit(seed=0, missing=(2,), epochs=20):
    g = small_geometry(m=12, n=4, k=5)
    cube = synthesize(g, [EventSpec("hyperbolic", 0.01, 2000.0)], WaveletSpec(40.0, 0.02))
    mask = SamplingMask(5, missing)
    obs = apply_forward(cube, mask)
    model, hist = fit(obs, g, mask, EncodingSpec(1, 2, 1), TrainConfig(epochs=epochs, seed=seed),
                      width=8, hidden_layers=2)
    return g, obs, mask, model, hist


def test_fit_history_length_and_purity():
    g, obs, mask, model, hist = tiny_fit(epochs=15)
    assert hist.shape == (15,)
    assert model.geometry_fingerprint == g.fingerprint()
    assert model.normalizer == build_normalizer(g, obs)


def test_fit_without_missing_shots():
    g, obs, mask, model, _ = tiny_fit(missing=())
    assert interpolate(model, g, mask, obs) == obs


def test_interpolate_keeps_observed_exactly():
    g, obs, mask, model, _ = tiny_fit()
    out = interpolate(model, g, mask, obs)
    assert apply_forward(out, mask) == obs


def test_seeded_determinism():
    a = tiny_fit(seed=4)
    b = tiny_fit(seed=4)
    assert np.array_equal(a[4], b[4])
    assert interpolate(a[3], a[0], a[2], a[1]) == interpolate(b[3], b[0], b[2], b[1])


def test_query_contract():
    g, obs, mask, model, _ = tiny_fit()
    assert query(model, np.empty((0, 3))).shape == (0,)
    v = np.array([[0.2, 0.4, 0.5], [0.2, 0.4, 0.5]])
    out = query(model, v)
    assert out[0] == out[1]
    with pytest.raises(DomainError):
        query(model, np.array([[0.2, 1.2, 0.5]]))


def test_interpolate_rejects_other_geometry():
    g, obs, mask, model, _ = tiny_fit()
    other = small_geometry(m=12, n=4, k=5, ds=31.0)
    with pytest.raises(ValueError):
        interpolate(model, other, mask, obs)


def test_query_at_observed_sample_within_fit_residual(hyperbola_case):
    g, cube, mask, obs, model, hist = hyperbola_case
    norm = model.normalizer
    samples = extract_samples(obs, g, mask, norm)
    i = int(np.argmax(samples.r))
    pred = query(model, samples.v[i : i + 1])[0]
    truth = norm.denormalize_amplitude(samples.r[i])
    # a single squared residual can be at most N times the mean
    bound = np.sqrt(hist[-1] * len(samples)) * (norm.amp_max - norm.amp_min)
    assert abs(pred - truth) <= bound
    assert hist[-1] < hist[0]


def test_beats_sbi_on_missing_shot(hyperbola_case):
    g, cube, mask, obs, model, _ = hyperbola_case
    est = interpolate(model, g, mask, obs)
    sbi = sbi_admm(obs, g, mask).cube
    for j in mask.missing:
        assert shot_scores(cube.shot(j), est.shot(j))[0] > shot_scores(cube.shot(j), sbi.shot(j))[0]


def test_predicted_shot_is_spectrally_smooth(hyperbola_case):
    g, cube, mask, obs, model, _ = hyperbola_case
    est = interpolate(model, g, mask, obs)
    spec = fk_spectrum(est.shot(mask.missing[0]), g.dt, DG)
    F, K = np.meshgrid(spec.frequencies, spec.wavenumbers, indexing="ij")
    # apparent slowness of the hyperbola never exceeds 1 / v; allow one wavenumber bin
    in_band = np.abs(K) <= F / VELOCITY + 1.0 / (g.shape[1] * DG)
    energy = np.where(F > 0, 2.0, 1.0) * spec.magnitude ** 2
    assert energy[in_band].sum() >= 10.0 * energy[~in_band].sum()


def test_fit_interpolate_accepts_full_cube():
    g = small_geometry(m=12, n=4, k=5)
    cube = synthesize(g, [EventSpec("linear", 0.01, 1500.0)], WaveletSpec(40.0, 0.02))
    mask = SamplingMask(5, (1,))
    out, model, hist = fit_interpolate(cube, g, mask, EncodingSpec(1, 1, 1), TrainConfig(epochs=3),
                                       width=4, hidden_layers=1)
    assert apply_forward(out, mask) == apply_forward(cube, mask)
    assert hist.shape == (3,)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cobsi.encoding import EncodingSpec, encode, encode_axis, frequencies
from cobsi.errors import DomainError

PI = np.pi


def test_frequencies_linear_and_exponential():
    assert np.array_equal(frequencies(3, "linear"), [PI / 2, PI, 3 * PI / 2])
    assert np.array_equal(frequencies(3, "exponential"), [PI, 2 * PI, 4 * PI])
    assert frequencies(1, "linear")[0] == PI / 2
    assert frequencies(1, "exponential")[0] == PI


@pytest.mark.parametrize("U", range(1, 17))
def test_frequencies_closed_form(U):
    lin = [i * PI / 2 for i in range(1, U + 1)]
    exp = [PI * 2 ** (i - 1) for i in range(1, U + 1)]
    assert frequencies(U, "linear").tolist() == lin
    assert frequencies(U, "exponential").tolist() == exp


def test_encode_axis_values():
    assert np.array_equal(encode_axis(0.0, 4), [1, 0] * 4)
    np.testing.assert_allclose(encode_axis(1.0, 2), [0, 1, -1, 0], atol=1e-15)
    h = np.sqrt(2) / 2
    np.testing.assert_allclose(encode_axis(0.5, 2), [h, h, 0, 1], atol=1e-15)


def test_encode_axis_domain():
    with pytest.raises(DomainError):
        encode_axis(1.0 + 1e-9, 2)
    with pytest.raises(DomainError):
        encode_axis(np.array([0.2, -0.1]), 1)
    with pytest.raises(DomainError):
        encode_axis(np.nan, 1)


@pytest.mark.parametrize(
    "counts,length", [((1, 2, 1), 8), ((9, 5, 8), 44), ((5, 5, 1), 22), ((8, 5, 8), 42)]
)
def test_encode_lengths(counts, length):
    spec = EncodingSpec(*counts)
    assert spec.dim == length
    assert encode(np.array([0.3, 0.6, 0.9]), spec).shape == (length,)


def test_encode_origin():
    assert np.array_equal(encode(np.zeros(3), EncodingSpec(2, 3, 1)), [1, 0] * 6)


def test_spec_parse():
    assert EncodingSpec.parse("121") == EncodingSpec(1, 2, 1)
    assert EncodingSpec.parse("9,5,8", "exponential") == EncodingSpec(9, 5, 8, "exponential")
    with pytest.raises(ValueError):
        EncodingSpec(0, 1, 1)


@settings(max_examples=60, deadline=None)
@given(
    M=st.integers(1, 16),
    N=st.integers(1, 16),
    K=st.integers(1, 16),
    sampling=st.sampled_from(["linear", "exponential"]),
    seed=st.integers(0, 2**32 - 1),
)
def test_encode_length_and_range(M, N, K, sampling, seed):
    spec = EncodingSpec(M, N, K, sampling)
    v = np.random.default_rng(seed).random((50, 3))
    out = encode(v, spec)
    assert out.shape == (50, 2 * (M + N + K))
    assert np.all(np.abs(out) <= 1.0)


def test_range_bulk(rng):
    specs = [EncodingSpec(*rng.integers(1, 17, 3), sampling=s) for s in ("linear", "exponential") * 5]
    total = 0
    for spec in specs:
        out = encode(rng.random((10_000, 3)), spec)
        assert np.all((out >= -1.0) & (out <= 1.0))
        total += out.shape[0]
    assert total == 10 ** 5


def test_axis_independence(rng):
    spec = EncodingSpec(3, 2, 4)
    v = rng.random(3)
    base = encode(v, spec)
    vx = v.copy()
    vx[0] = 1 - v[0]
    dx = encode(vx, spec) != base
    assert dx[: 2 * spec.M].any() and not dx[2 * spec.M :].any()
    vz = v.copy()
    vz[2] = 1 - v[2]
    dz = encode(vz, spec) != base
    assert dz[-2 * spec.K :].any() and not dz[: -2 * spec.K].any()


@pytest.mark.parametrize("U", [1, 2, 5])
def test_linear_axis_injective_on_grid(U):
    grid = np.linspace(0.0, 1.0, 10_000)
    enc = encode_axis(grid, U)
    # the first cos/sin pair alone traces a quarter circle; distinct angles stay distinct
    d = np.min(np.linalg.norm(np.diff(enc, axis=0), axis=1))
    assert d > 0
    assert np.unique(enc, axis=0).shape[0] == grid.size

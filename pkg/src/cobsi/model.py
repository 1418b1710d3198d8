"""
Coordinate-based shot interpolation.

A neural field is fit to the acquired samples of one survey only, then
queried at the coordinates of the missing shots. Acquired shots are never
overwritten by network output.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from . import neuralnet as nn
from .encoding import EncodingSpec, encode
from .errors import DimensionError, DomainError
from .survey import (
    Normalizer,
    SamplingMask,
    SeismicCube,
    SurveyGeometry,
    apply_forward,
    assemble,
    build_normalizer,
    coordinates_for_missing,
    extract_samples,
)

#: triples pushed through the network at once when querying
QUERY_BATCH = 65536


@dataclass(frozen=True, eq=False)
class CobsiModel:
    encoding: EncodingSpec
    params: nn.MlpParams
    normalizer: Normalizer
    geometry_fingerprint: str

    def __post_init__(self):
        if self.params.spec.input_dim != self.encoding.dim:
            raise DimensionError(
                f"network input {self.params.spec.input_dim} != encoding length {self.encoding.dim}"
            )

    @property
    def mlp_spec(self) -> nn.MlpSpec:
        return self.params.spec


def fit(
    observed: SeismicCube,
    geometry: SurveyGeometry,
    mask: SamplingMask,
    encoding: EncodingSpec,
    train: nn.TrainConfig = nn.TrainConfig(),
    width: int = 128,
    hidden_layers: int = 15,
    callback: Optional[Callable[[int, float], None]] = None,
) -> Tuple[CobsiModel, np.ndarray]:
    """
    Train the neural field on the ``m * n * (k - s)`` acquired samples.

    Returns the model and the per-epoch training loss.
    """
    norm = build_normalizer(geometry, observed)
    samples = extract_samples(observed, geometry, mask, norm)
    X = encode(samples.v, encoding)
    spec = nn.MlpSpec(encoding.dim, width, hidden_layers)
    params, history = nn.train(spec, X, samples.r, train, callback=callback)
    model = CobsiModel(encoding, params, norm, geometry.fingerprint())
    return model, history


def query(model: CobsiModel, v) -> np.ndarray:
    """Amplitudes in data units at normalized ``(N, 3)`` coordinates, order kept."""
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        return np.empty(0)
    if v.ndim != 2 or v.shape[1] != 3:
        raise DimensionError(f"query coordinates must have shape (N, 3), got {v.shape}")
    if not np.all((v >= 0.0) & (v <= 1.0)):
        raise DomainError("query coordinates must lie inside the acquisition domain [0, 1]^3")
    out = np.empty(v.shape[0])
    for start in range(0, v.shape[0], QUERY_BATCH):
        chunk = encode(v[start : start + QUERY_BATCH], model.encoding)
        out[start : start + QUERY_BATCH] = nn.forward(model.params, chunk)
    return model.normalizer.denormalize_amplitude(out)


def interpolate(
    model: CobsiModel, geometry: SurveyGeometry, mask: SamplingMask, observed: SeismicCube
) -> SeismicCube:
    """Full ``(m, n, k)`` survey: acquired shots verbatim, missing shots predicted."""
    if geometry.fingerprint() != model.geometry_fingerprint:
        raise ValueError("model was fit on a different survey geometry")
    if mask.s == 0:
        return assemble(observed, np.empty((observed.m, observed.n, 0)), mask)
    v = coordinates_for_missing(geometry, mask, model.normalizer)
    pred = query(model, v).reshape((observed.m, observed.n, mask.s), order="F")
    return assemble(observed, pred, mask)


def fit_interpolate(
    full_or_observed: SeismicCube,
    geometry: SurveyGeometry,
    mask: SamplingMask,
    encoding: EncodingSpec,
    train: nn.TrainConfig = nn.TrainConfig(),
    **kwargs,
) -> Tuple[SeismicCube, CobsiModel, np.ndarray]:
    """Convenience wrapper: decimate a full cube if needed, fit, interpolate."""
    observed = full_or_observed
    if observed.k == mask.total_shots and mask.s:
        observed = apply_forward(observed, mask)
    model, history = fit(observed, geometry, mask, encoding, train, **kwargs)
    return interpolate(model, geometry, mask, observed), model, history

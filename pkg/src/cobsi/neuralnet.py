"""
Multilayer perceptron with ReLU hidden layers and a sigmoid output.

The network maps an encoded coordinate of length ``D`` to one amplitude in
``(0, 1)``::

    h_1 = relu(x W_1 + b_1)                 (D -> width)
    h_i = relu(h_{i-1} W_i + b_i)           (width -> width), i = 2..H
    y   = sigmoid(h_H W_out + b_out)        (width -> 1)

Gradients of the mean squared error are computed by hand-written
backpropagation and the parameters are updated with bias-corrected Adam.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, NumericalError

log = logging.getLogger(__name__)

#: sample count up to which an automatic batch size means full batch
FULL_BATCH_LIMIT = 65536
#: minibatch size used above ``FULL_BATCH_LIMIT``
AUTO_BATCH = 4096

_PRECISIONS = {"float64": np.float64, "float32": np.float32}


@dataclass(frozen=True)
class MlpSpec:
    """Shape of the network: input length, hidden width and hidden depth."""

    input_dim: int
    width: int
    hidden_layers: int = 15
    output_dim: int = 1

    def __post_init__(self):
        if self.input_dim < 1 or self.width < 1 or self.hidden_layers < 1:
            raise ValueError(f"invalid network shape {self}")
        if self.output_dim != 1:
            raise ValueError("the network has a single scalar output")

    @property
    def layer_shapes(self) -> List[Tuple[int, int]]:
        """``(fan_in, fan_out)`` for every affine map, output layer last."""
        dims = [self.input_dim] + [self.width] * self.hidden_layers + [self.output_dim]
        return list(zip(dims[:-1], dims[1:]))


def param_count(spec: MlpSpec) -> int:
    """Number of trainable scalars (weights plus biases)."""
    D, w, H = spec.input_dim, spec.width, spec.hidden_layers
    return (D * w + w) + (H - 1) * (w * w + w) + (w + 1)


@dataclass
class MlpParams:
    """Weights stored as ``(fan_in, fan_out)`` matrices, biases as vectors."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise DimensionError("weights and biases must be non-empty lists of equal length")

    @property
    def spec(self) -> MlpSpec:
        return MlpSpec(
            input_dim=self.weights[0].shape[0],
            width=self.weights[0].shape[1],
            hidden_layers=len(self.weights) - 1,
        )

    @property
    def dtype(self):
        return self.weights[0].dtype

    def arrays(self) -> List[np.ndarray]:
        """All parameter arrays in layer order ``W_1, b_1, W_2, b_2, ...``."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out.extend((W, b))
        return out

    @property
    def size(self) -> int:
        return sum(a.size for a in self.arrays())

    def copy(self) -> "MlpParams":
        return MlpParams([W.copy() for W in self.weights], [b.copy() for b in self.biases])

    def astype(self, dtype) -> "MlpParams":
        return MlpParams(
            [W.astype(dtype) for W in self.weights], [b.astype(dtype) for b in self.biases]
        )

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    @classmethod
    def from_flat(cls, spec: MlpSpec, vector: np.ndarray) -> "MlpParams":
        vector = np.asarray(vector)
        if vector.size != param_count(spec):
            raise DimensionError(f"expected {param_count(spec)} values, got {vector.size}")
        weights, biases, pos = [], [], 0
        for fan_in, fan_out in spec.layer_shapes:
            weights.append(vector[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out).copy())
            pos += fan_in * fan_out
            biases.append(vector[pos : pos + fan_out].copy())
            pos += fan_out
        return cls(weights, biases)

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


@dataclass(frozen=True)
class TrainConfig:
    """
    Optimizer and schedule settings.

    ``batch_size`` of ``None`` picks full batch up to ``FULL_BATCH_LIMIT``
    samples and ``AUTO_BATCH`` minibatches above it; ``0`` forces full batch.
    ``precision`` selects the arithmetic used during training.

    The loss history holds, per epoch, the mean squared error over every
    training sample. By default that is the sample-weighted mean of the
    minibatch losses seen during the epoch (no extra pass); with
    ``exact_loss`` the whole dataset is re-evaluated with the end-of-epoch
    parameters instead.
    """

    learning_rate: float = 1e-3
    epochs: int = 1000
    batch_size: Optional[int] = None
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    precision: str = "float64"
    exact_loss: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size is not None and self.batch_size < 0:
            raise ValueError("batch_size must be >= 0")
        if self.precision not in _PRECISIONS:
            raise ValueError(f"precision must be one of {sorted(_PRECISIONS)}")

    def resolve_batch(self, n_samples: int) -> int:
        if self.batch_size is None:
            return n_samples if n_samples <= FULL_BATCH_LIMIT else AUTO_BATCH
        if self.batch_size == 0:
            return n_samples
        return min(self.batch_size, n_samples)


@dataclass
class OptimizerState:
    """Adam moment accumulators, one pair per parameter array."""

    first: List[np.ndarray]
    second: List[np.ndarray]
    step: int = 0

    @classmethod
    def zeros_like(cls, params: MlpParams) -> "OptimizerState":
        arrays = params.arrays()
        return cls([np.zeros_like(a) for a in arrays], [np.zeros_like(a) for a in arrays], 0)

    def copy(self) -> "OptimizerState":
        return OptimizerState(
            [a.copy() for a in self.first], [a.copy() for a in self.second], self.step
        )


def _views(spec: MlpSpec, vector: np.ndarray) -> MlpParams:
    """Parameters whose arrays are reshaped views into ``vector``."""
    weights, biases, pos = [], [], 0
    for fan_in, fan_out in spec.layer_shapes:
        weights.append(vector[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out))
        pos += fan_in * fan_out
        biases.append(vector[pos : pos + fan_out])
        pos += fan_out
    return MlpParams(weights, biases)


def init_params(spec: MlpSpec, seed: int = 0, dtype=np.float64) -> MlpParams:
    """He-uniform weights in ``+-sqrt(6 / fan_in)``, zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in spec.layer_shapes:
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)).astype(dtype))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return MlpParams(weights, biases)


def _sigmoid(z):
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _as_batch(params: MlpParams, x) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=params.dtype)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != params.weights[0].shape[0]:
        raise DimensionError(
            f"input has shape {x.shape}, network expects length {params.weights[0].shape[0]}"
        )
    return x, single


class _Workspace:
    """
    Preallocated activations, backprop buffers and a flat gradient for
    batches of up to ``rows`` samples. Reusing them avoids fresh large
    allocations (and their page faults) on every step.
    """

    def __init__(self, spec: MlpSpec, rows: int, dtype):
        self.acts = [np.empty((rows, spec.width), dtype) for _ in range(spec.hidden_layers)]
        self.deltas = [np.empty((rows, spec.width), dtype) for _ in range(2)]
        self.mask = np.empty((rows, spec.width), dtype=bool)
        self.z = np.empty((rows, 1), dtype)
        self.grad = np.empty(param_count(spec), dtype)
        self.grads = _views(spec, self.grad)


def _backprop(params: MlpParams, X: np.ndarray, r: np.ndarray, ws: _Workspace) -> float:
    """Batch MSE of ``params``; its gradient is left in ``ws.grad``."""
    b = X.shape[0]
    Ws, bs = params.weights, params.biases
    inputs = [X]
    for W, bias, buf in zip(Ws[:-1], bs[:-1], ws.acts):
        h = buf[:b]
        np.matmul(inputs[-1], W, out=h)
        h += bias
        np.maximum(h, 0, out=h)
        inputs.append(h)
    z = ws.z[:b]
    np.matmul(inputs[-1], Ws[-1], out=z)
    z += bs[-1]
    p = _sigmoid(z[:, 0])
    res = p - r
    value = float(np.mean(res * res, dtype=np.float64))
    # d(mean sq)/dz_out through the sigmoid
    delta = ((2.0 / b) * res * p * (1.0 - p))[:, None]
    g = ws.grads
    spare = 0
    for i in range(len(Ws) - 1, -1, -1):
        np.matmul(inputs[i].T, delta, out=g.weights[i])
        np.sum(delta, axis=0, out=g.biases[i])
        if i > 0:
            nxt = ws.deltas[spare][:b]
            spare ^= 1
            if delta.shape[1] == 1:
                # BLAS is slow on the single-column outer product; broadcasting is exact
                np.multiply(delta, Ws[i].T, out=nxt)
            else:
                np.matmul(delta, Ws[i].T, out=nxt)
            # relu'(0) taken as 0
            mask = ws.mask[:b]
            np.greater(inputs[i], 0, out=mask)
            nxt *= mask
            delta = nxt
    return value


def _forward_batch(params: MlpParams, X: np.ndarray) -> np.ndarray:
    h = X
    for W, b in zip(params.weights[:-1], params.biases[:-1]):
        h = h @ W
        h += b
        np.maximum(h, 0, out=h)
    return _sigmoid((h @ params.weights[-1] + params.biases[-1])[:, 0])


def forward(params: MlpParams, x):
    """Network output for one encoded vector (returns float) or a batch ``(N, D)``."""
    X, single = _as_batch(params, x)
    y = _forward_batch(params, X)
    return float(y[0]) if single else y


def _targets(params: MlpParams, X, r) -> Tuple[np.ndarray, np.ndarray]:
    X, _ = _as_batch(params, X)
    r = np.atleast_1d(np.asarray(r, dtype=params.dtype))
    if r.shape != (X.shape[0],):
        raise DimensionError(f"{X.shape[0]} inputs but targets have shape {r.shape}")
    if X.shape[0] == 0:
        raise ValueError("loss needs at least one sample")
    return X, r


def loss(params: MlpParams, X, r) -> float:
    """Mean squared error between ``forward(params, X)`` and targets ``r``."""
    X, r = _targets(params, X, r)
    res = _forward_batch(params, X) - r
    return float(np.mean(res * res, dtype=np.float64))


def loss_and_gradients(params: MlpParams, X, r) -> Tuple[float, MlpParams]:
    X, r = _targets(params, X, r)
    ws = _Workspace(params.spec, X.shape[0], params.dtype)
    value = _backprop(params, X, r, ws)
    return value, ws.grads


def gradients(params: MlpParams, X, r) -> MlpParams:
    """Exact gradient of the batch MSE with respect to every weight and bias."""
    return loss_and_gradients(params, X, r)[1]


def _adam_inplace(arrays: Sequence[np.ndarray], grads: Sequence[np.ndarray],
                  state: OptimizerState, config: TrainConfig,
                  scratch: Optional[Sequence[np.ndarray]] = None) -> None:
    state.step += 1
    b1, b2 = config.beta1, config.beta2
    t = state.step
    step_size = config.learning_rate / (1.0 - b1 ** t)
    corr2 = 1.0 - b2 ** t
    for j, (p, g, m1, m2) in enumerate(zip(arrays, grads, state.first, state.second)):
        tmp = np.empty_like(g) if scratch is None else scratch[j]
        m1 *= b1
        np.multiply(g, 1.0 - b1, out=tmp)
        m1 += tmp
        m2 *= b2
        np.multiply(g, g, out=tmp)
        tmp *= 1.0 - b2
        m2 += tmp
        # p -= step_size * m1 / (sqrt(m2 / corr2) + eps)
        np.divide(m2, corr2, out=tmp)
        np.sqrt(tmp, out=tmp)
        tmp += config.eps
        np.divide(m1, tmp, out=tmp)
        tmp *= step_size
        p -= tmp


def optimizer_step(params: MlpParams, grads: MlpParams, state: OptimizerState,
                   config: TrainConfig) -> Tuple[MlpParams, OptimizerState]:
    """One Adam update; inputs are left untouched and new objects returned."""
    if len(grads.weights) != len(params.weights):
        raise DimensionError("gradient and parameter layer counts differ")
    new_params, new_state = params.copy(), state.copy()
    _adam_inplace(new_params.arrays(), grads.arrays(), new_state, config)
    return new_params, new_state


def _epoch_loss(params: MlpParams, X: np.ndarray, r: np.ndarray, chunk: int = 2048) -> float:
    # small chunks keep the activations in cache
    total = 0.0
    for start in range(0, X.shape[0], chunk):
        res = _forward_batch(params, X[start : start + chunk]) - r[start : start + chunk]
        total += float(np.sum(res * res, dtype=np.float64))
    return total / X.shape[0]


def train(
    spec: MlpSpec,
    X,
    r,
    config: TrainConfig,
    init: Optional[MlpParams] = None,
    callback: Optional[Callable[[int, float], None]] = None,
) -> Tuple[MlpParams, np.ndarray]:
    """
    Fit the network to encoded inputs ``X`` (``(N, D)``) and targets ``r``.

    Returns the trained parameters (float64) and the per-epoch loss over
    the full dataset (see ``TrainConfig``). Minibatch order is reshuffled each epoch
    from a generator seeded by ``config.seed``.
    """
    dtype = _PRECISIONS[config.precision]
    X = np.ascontiguousarray(X, dtype=dtype)
    r = np.ascontiguousarray(r, dtype=dtype).ravel()
    if X.ndim != 2 or X.shape[1] != spec.input_dim:
        raise DimensionError(f"inputs have shape {X.shape}, spec expects D={spec.input_dim}")
    if X.shape[0] == 0 or r.shape[0] != X.shape[0]:
        raise ValueError("training needs a non-empty set of matching inputs and targets")

    seeds = np.random.SeedSequence(config.seed).spawn(2)
    if init is None:
        start_params = init_params(spec, seed=seeds[0].generate_state(1)[0], dtype=dtype)
    else:
        start_params = init.astype(dtype)
    shuffle_rng = np.random.default_rng(seeds[1])
    # one contiguous buffer, so an Adam step is a few vector ops
    theta = start_params.flat()
    params = _views(spec, theta)
    state = OptimizerState([np.zeros_like(theta)], [np.zeros_like(theta)])

    n = X.shape[0]
    batch = config.resolve_batch(n)
    ws = _Workspace(spec, batch, dtype)
    scratch = [np.empty_like(theta)]
    xb = np.empty((batch, X.shape[1]), dtype)
    rb = np.empty(batch, dtype)
    history = np.empty(config.epochs)
    for epoch in range(config.epochs):
        if batch >= n:
            value = _backprop(params, X, r, ws)
            _adam_inplace([theta], [ws.grad], state, config, scratch)
        else:
            order = shuffle_rng.permutation(n)
            value = 0.0
            for start in range(0, n, batch):
                idx = order[start : start + batch]
                b = idx.size
                np.take(X, idx, axis=0, out=xb[:b])
                np.take(r, idx, out=rb[:b])
                value += _backprop(params, xb[:b], rb[:b], ws) * b
                _adam_inplace([theta], [ws.grad], state, config, scratch)
            value /= n
        if config.exact_loss:
            value = _epoch_loss(params, X, r)
        if not np.isfinite(value) or not np.all(np.isfinite(theta)):
            raise NumericalError(
                f"training diverged at epoch {epoch + 1}: loss={value!r}; "
                f"try a smaller learning rate (currently {config.learning_rate})"
            )
        history[epoch] = value
        if callback is not None:
            callback(epoch, value)
        if (epoch + 1) % 100 == 0:
            log.debug("epoch %d loss %.6e", epoch + 1, value)
    return params.astype(np.float64), history

"""Self-normalizing feed-forward network with SELU units and alpha dropout.

Hidden activations use SELU; the output layer is affine, with
probabilities through the logistic link at inference. Weights initialize
from N(0, 1/fan_in), the regime in which activations stay near zero mean
and unit variance layer after layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dataset import LabelMatrix, N_ENDPOINTS
from .linear import TrainConfig, _batches
from .losses import TrainingDiverged, masked_bce, sigmoid

SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772

# value a dropped unit is set to, per the self-normalizing design
_DROP_VALUE = -SELU_LAMBDA * SELU_ALPHA


def selu(x):
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0, SELU_LAMBDA * x, SELU_LAMBDA * SELU_ALPHA * np.expm1(x))


def selu_grad(x):
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0, SELU_LAMBDA, SELU_LAMBDA * SELU_ALPHA * np.exp(x))


def alpha_dropout(values, rate: float, seed: int):
    """Alpha dropout: drop to -lambda*alpha, then restore mean and variance.

    Identity when rate == 0. Deterministic for a fixed seed.
    """
    values = np.asarray(values, dtype=np.float64)
    if rate == 0.0:
        return values.copy()
    if not 0.0 <= rate < 1.0:
        raise ValueError("rate must be in [0, 1)")
    rng = np.random.default_rng(seed)
    keep_mask = rng.random(values.shape) >= rate
    return _alpha_dropout_masked(values, keep_mask, rate)[0]


def _alpha_dropout_masked(values, keep_mask, rate):
    """(output, input gradient factor) given a fixed keep mask."""
    q = 1.0 - rate
    scale = 1.0 / np.sqrt(q + _DROP_VALUE ** 2 * q * rate)
    shift = -scale * rate * _DROP_VALUE
    out = scale * np.where(keep_mask, values, _DROP_VALUE) + shift
    grad_factor = scale * keep_mask
    return out, grad_factor


@dataclass
class SnnModel:
    kind = "snn"

    weights: list[np.ndarray] = field(default_factory=list)  # per layer (out, in)
    biases: list[np.ndarray] = field(default_factory=list)
    alpha_dropout_rate: float = 0.0
    pipeline_ref: str = ""
    final_loss: float = float("nan")

    @property
    def input_width(self) -> int:
        return self.weights[0].shape[1]

    @property
    def layer_widths(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def logits_row(self, x: np.ndarray) -> np.ndarray:
        a = x
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            a = selu(W @ a + b)
        return self.weights[-1] @ a + self.biases[-1]

    def predict_row(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self.logits_row(x))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Row-by-row so a prediction never depends on its batch."""
        X = np.asarray(X, dtype=np.float64)
        return np.vstack([self.predict_row(row) for row in X])

    def arrays(self) -> list[tuple[str, np.ndarray]]:
        out = []
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            out.append((f"W{i}", W))
            out.append((f"b{i}", b))
        return out


def init_snn(input_width: int, hidden: list[int], seed: int,
             alpha_dropout_rate: float = 0.0, pipeline_ref: str = "") -> SnnModel:
    """Normal(0, 1/fan_in) weights, zero biases."""
    rng = np.random.default_rng(seed)
    widths = [input_width] + list(hidden) + [N_ENDPOINTS]
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        weights.append(rng.normal(0.0, np.sqrt(1.0 / fan_in), size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return SnnModel(weights=weights, biases=biases,
                    alpha_dropout_rate=alpha_dropout_rate, pipeline_ref=pipeline_ref)


def snn_forward(model: SnnModel, batch: np.ndarray) -> np.ndarray:
    """Probabilities for a batch (inference: no dropout)."""
    X = np.asarray(batch, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.input_width:
        raise ValueError(f"batch width must be {model.input_width}, got {X.shape}")
    logits, _ = _forward_cached(model, X, keep_masks=None)
    return sigmoid(logits)


def hidden_activations(model: SnnModel, batch: np.ndarray) -> list[np.ndarray]:
    """Post-SELU activations per hidden layer (for self-normalization checks)."""
    X = np.asarray(batch, dtype=np.float64)
    _, cache = _forward_cached(model, X, keep_masks=None)
    return [a for _, a, _ in cache[1:]]


def _forward_cached(model: SnnModel, X: np.ndarray, keep_masks):
    """Forward pass caching (pre-activation, activation, dropout grad factor)."""
    cache = [(None, X, None)]
    a = X
    n_hidden = len(model.weights) - 1
    for layer in range(n_hidden):
        z = a @ model.weights[layer].T + model.biases[layer]
        a = selu(z)
        grad_factor = None
        if keep_masks is not None and model.alpha_dropout_rate > 0.0:
            a, grad_factor = _alpha_dropout_masked(
                a, keep_masks[layer], model.alpha_dropout_rate)
        cache.append((z, a, grad_factor))
    logits = a @ model.weights[-1].T + model.biases[-1]
    return logits, cache


def snn_gradients(model: SnnModel, X: np.ndarray, labels: np.ndarray, mask: np.ndarray,
                  l2: float = 0.0, keep_masks=None):
    """(loss, per-layer weight grads, per-layer bias grads) by backprop."""
    logits, cache = _forward_cached(model, X, keep_masks)
    loss, dlogits = masked_bce(logits, labels, mask)
    if l2:
        loss += 0.5 * l2 * sum(float((W ** 2).sum()) for W in model.weights)

    grads_W = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    delta = dlogits
    for layer in range(len(model.weights) - 1, -1, -1):
        _, a_prev, _ = cache[layer]
        grads_W[layer] = delta.T @ a_prev + (l2 * model.weights[layer] if l2 else 0.0)
        grads_b[layer] = delta.sum(axis=0)
        if layer == 0:
            break
        z_prev, _, grad_factor = cache[layer]
        upstream = delta @ model.weights[layer]
        if grad_factor is not None:
            upstream = upstream * grad_factor
        delta = upstream * selu_grad(z_prev)
    return loss, grads_W, grads_b


def train_snn(features: np.ndarray, truth: LabelMatrix, hidden: list[int] | None = None,
              hyper: TrainConfig = TrainConfig(), alpha_dropout_rate: float = 0.0,
              pipeline_ref: str = "") -> SnnModel:
    """Seeded training with the same masked objective as the linear baseline."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != len(truth):
        raise ValueError(f"features must be {len(truth)} rows, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain non-finite values")
    labels, mask = truth.labels_and_mask()
    if not mask.any():
        raise ValueError("training data has no present labels")
    if hidden is None:
        hidden = [128, 128]

    model = init_snn(X.shape[1], hidden, hyper.seed,
                     alpha_dropout_rate=alpha_dropout_rate, pipeline_ref=pipeline_ref)
    vel_W = [np.zeros_like(W) for W in model.weights]
    vel_b = [np.zeros_like(b) for b in model.biases]
    rng = np.random.default_rng(hyper.seed + 1)
    dropout_rng = np.random.default_rng(hyper.seed + 2)
    last_loss = float("nan")
    n_hidden = len(model.weights) - 1

    for epoch in range(hyper.epochs):
        epoch_loss = 0.0
        n_batches = 0
        for idx in _batches(X.shape[0], hyper.batch_size, rng):
            keep_masks = None
            if alpha_dropout_rate > 0.0:
                keep_masks = [
                    dropout_rng.random((len(idx), model.weights[k].shape[0])) >= alpha_dropout_rate
                    for k in range(n_hidden)
                ]
            loss, gW, gb = snn_gradients(model, X[idx], labels[idx], mask[idx],
                                         l2=hyper.l2, keep_masks=keep_masks)
            if not np.isfinite(loss):
                raise TrainingDiverged(epoch, loss, f"lr={hyper.learning_rate}")
            for k in range(len(model.weights)):
                vel_W[k] = hyper.momentum * vel_W[k] - hyper.learning_rate * gW[k]
                vel_b[k] = hyper.momentum * vel_b[k] - hyper.learning_rate * gb[k]
                model.weights[k] = model.weights[k] + vel_W[k]
                model.biases[k] = model.biases[k] + vel_b[k]
            epoch_loss += loss
            n_batches += 1
        last_loss = epoch_loss / max(n_batches, 1)
        if not all(np.all(np.isfinite(W)) for W in model.weights):
            raise TrainingDiverged(epoch, last_loss, "parameters non-finite")

    model.final_loss = last_loss
    return model

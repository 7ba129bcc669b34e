"""Masked multitask logistic regression trained by mini-batch gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import LabelMatrix, N_ENDPOINTS
from .losses import TrainingDiverged, masked_bce, sigmoid


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-4
    epochs: int = 100
    batch_size: int = 64
    seed: int = 0
    momentum: float = 0.9

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "momentum": self.momentum,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


@dataclass
class LinearModel:
    kind = "linear"

    weights: np.ndarray  # (12, d)
    bias: np.ndarray     # (12,)
    pipeline_ref: str = ""
    final_loss: float = float("nan")

    @property
    def input_width(self) -> int:
        return self.weights.shape[1]

    def predict_row(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self.weights @ x + self.bias)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Row-by-row so a prediction never depends on its batch."""
        X = np.asarray(X, dtype=np.float64)
        return np.vstack([self.predict_row(row) for row in X])

    def arrays(self) -> list[tuple[str, np.ndarray]]:
        return [("weights", self.weights), ("bias", self.bias)]


def _batches(n: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def train_linear(features: np.ndarray, truth: LabelMatrix,
                 hyper: TrainConfig = TrainConfig(), pipeline_ref: str = "") -> LinearModel:
    """Seeded, bit-reproducible training on the masked BCE objective."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != len(truth):
        raise ValueError(f"features must be {len(truth)} rows, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain non-finite values")
    labels, mask = truth.labels_and_mask()
    if not mask.any():
        raise ValueError("training data has no present labels")

    n, d = X.shape
    W = np.zeros((N_ENDPOINTS, d))
    b = np.zeros(N_ENDPOINTS)
    vW = np.zeros_like(W)
    vb = np.zeros_like(b)
    rng = np.random.default_rng(hyper.seed)
    last_loss = float("nan")

    for epoch in range(hyper.epochs):
        epoch_loss = 0.0
        n_batches = 0
        for idx in _batches(n, hyper.batch_size, rng):
            Xb = X[idx]
            # divergence is detected by the finiteness checks below, not warnings
            with np.errstate(over="ignore", invalid="ignore"):
                logits = Xb @ W.T + b
            loss, dlogits = masked_bce(logits, labels[idx], mask[idx])
            if not np.isfinite(loss):
                raise TrainingDiverged(epoch, loss, f"lr={hyper.learning_rate}")
            gW = dlogits.T @ Xb + hyper.l2 * W
            gb = dlogits.sum(axis=0)
            vW = hyper.momentum * vW - hyper.learning_rate * gW
            vb = hyper.momentum * vb - hyper.learning_rate * gb
            W = W + vW
            b = b + vb
            epoch_loss += loss
            n_batches += 1
        last_loss = epoch_loss / max(n_batches, 1)
        if not np.isfinite(last_loss) or not np.all(np.isfinite(W)):
            raise TrainingDiverged(epoch, last_loss, "parameters non-finite")

    return LinearModel(weights=W, bias=b, pipeline_ref=pipeline_ref, final_loss=last_loss)

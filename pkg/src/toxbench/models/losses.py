"""Masked binary cross-entropy over sparse multi-task labels."""

from __future__ import annotations

import numpy as np


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def masked_bce(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean BCE over present cells, with the gradient w.r.t. the logits.

    labels may hold NaN at masked positions (the LabelMatrix export does);
    masked cells contribute exactly zero loss and zero gradient. With no
    present cell the loss is 0 with an all-zero gradient.

    Uses the log-sum-exp form: bce(z, y) = max(z, 0) - z*y + log1p(exp(-|z|)).
    """
    logits = np.asarray(logits, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if logits.shape != mask.shape or np.asarray(labels).shape != mask.shape:
        raise ValueError("logits, labels and mask must share one shape")
    n_present = int(mask.sum())
    if n_present == 0:
        return 0.0, np.zeros_like(logits)

    y = np.where(mask, np.asarray(labels, dtype=np.float64), 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        per_cell = np.maximum(logits, 0.0) - logits * y + np.log1p(np.exp(-np.abs(logits)))
    loss = float(np.where(mask, per_cell, 0.0).sum() / n_present)
    grad = np.where(mask, sigmoid(logits) - y, 0.0) / n_present
    return loss, grad


class TrainingDiverged(RuntimeError):
    """Raised when a training loss leaves the finite range."""

    def __init__(self, epoch: int, loss: float, detail: str = ""):
        super().__init__(f"training diverged at epoch {epoch}: loss={loss!r} {detail}".rstrip())
        self.epoch = epoch
        self.loss = loss

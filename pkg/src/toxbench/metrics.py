"""Masked ROC-AUC, per-run scoring, and median/MAD aggregation.

AUC follows the rank-statistic (Mann-Whitney) formulation with midrank
tie handling: the probability that a random positive outranks a random
negative, ties credited one half. Masked entries contribute nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import ENDPOINTS, LabelMatrix, N_ENDPOINTS


class UndefinedAUC(ValueError):
    """AUC is undefined when one class is empty after masking."""

    def __init__(self, message: str, endpoint: str | None = None):
        super().__init__(message)
        self.endpoint = endpoint


class PredictionCoverageError(ValueError):
    pass


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def roc_auc(scores, labels, mask=None) -> float:
    """Masked AUC in O(n log n); raises UndefinedAUC on a single class."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be equal-length 1-D sequences")
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != scores.shape:
            raise ValueError("mask length mismatch")
        scores = scores[mask]
        labels = labels[mask]
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos + n_neg != len(labels):
        raise ValueError("labels must be 0 or 1 after masking")
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUC(f"need both classes, got {n_pos} positives / {n_neg} negatives")
    ranks = _midranks(scores)
    rank_sum_pos = float(ranks[labels == 1].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class EndpointScore:
    endpoint: str
    auc: float
    n_pos: int
    n_neg: int


@dataclass(frozen=True)
class RunScore:
    per_endpoint: tuple[EndpointScore, ...]
    mean_auc: float

    def auc_map(self) -> dict[str, float]:
        return {e.endpoint: e.auc for e in self.per_endpoint}

    def to_dict(self) -> dict:
        return {
            "mean_auc": self.mean_auc,
            "per_endpoint": {
                e.endpoint: {"auc": e.auc, "n_pos": e.n_pos, "n_neg": e.n_neg}
                for e in self.per_endpoint
            },
        }


def score_run(predictions: np.ndarray, truth: LabelMatrix) -> RunScore:
    """Per-endpoint masked AUC and their mean over the 12 endpoints.

    predictions must cover every (molecule, endpoint) cell with a finite
    value in [0, 1]; truth masking decides which cells are scored.
    """
    predictions = np.asarray(predictions, dtype=np.float64)
    if predictions.shape != (len(truth), N_ENDPOINTS):
        raise PredictionCoverageError(
            f"predictions must be {len(truth)}x{N_ENDPOINTS}, got {predictions.shape}")
    if not np.all(np.isfinite(predictions)):
        raise PredictionCoverageError("predictions contain non-finite values")
    if np.any(predictions < 0) or np.any(predictions > 1):
        raise PredictionCoverageError("predictions outside [0, 1]")

    scores = []
    for j, endpoint in enumerate(ENDPOINTS):
        labels, mask = truth.endpoint_column(endpoint)
        n_pos = int(np.sum(labels[mask] == 1))
        n_neg = int(np.sum(labels[mask] == 0))
        try:
            auc = roc_auc(predictions[:, j], labels, mask)
        except UndefinedAUC as exc:
            raise UndefinedAUC(str(exc), endpoint=endpoint) from None
        scores.append(EndpointScore(endpoint, auc, n_pos, n_neg))
    mean_auc = float(np.mean([s.auc for s in scores]))
    return RunScore(tuple(scores), mean_auc)


@dataclass(frozen=True)
class AggregateScore:
    run_means: tuple[float, ...]
    median: float
    mad: float

    def to_dict(self) -> dict:
        return {"run_means": list(self.run_means), "median": self.median, "mad": self.mad}


def _median(values: list[float]) -> float:
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def aggregate_runs(run_means) -> AggregateScore:
    """Median across reruns with the median absolute deviation."""
    run_means = [float(x) for x in run_means]
    if not run_means:
        raise ValueError("need at least one run")
    med = _median(run_means)
    mad = _median([abs(x - med) for x in run_means])
    return AggregateScore(tuple(run_means), med, mad)


def format_auc(value: float) -> str:
    """Report formatting: three decimal places."""
    return f"{value:.3f}"

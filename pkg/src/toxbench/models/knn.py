"""Tanimoto k-nearest-neighbor baseline over count fingerprints."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import LabelMatrix, N_ENDPOINTS
from ..featurize.layout import LAYOUT


def tanimoto(a: np.ndarray, b: np.ndarray) -> float:
    """Sum-min over sum-max similarity; 1.0 when both vectors are all-zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"width mismatch: {a.shape} vs {b.shape}")
    denom = np.maximum(a, b).sum()
    if denom == 0.0:
        return 1.0
    return float(np.minimum(a, b).sum() / denom)


def tanimoto_row(query: np.ndarray, stored: np.ndarray) -> np.ndarray:
    """Similarity of one query against every stored fingerprint."""
    mins = np.minimum(stored, query).sum(axis=1)
    maxs = np.maximum(stored, query).sum(axis=1)
    out = np.ones(len(stored))
    nonzero = maxs > 0
    out[nonzero] = mins[nonzero] / maxs[nonzero]
    return out


@dataclass
class KnnModel:
    kind = "knn"

    fingerprints: np.ndarray       # (m, fingerprint width)
    label_values: np.ndarray       # (m, 12) float, -1 where masked
    label_mask: np.ndarray         # (m, 12) bool
    k: int = 5
    pipeline_ref: str = ""
    input_width_override: int | None = None

    def __post_init__(self):
        if self.k < 1 or self.k > len(self.fingerprints):
            raise ValueError("k must be in [1, stored row count]")

    @property
    def input_width(self) -> int:
        if self.input_width_override is not None:
            return self.input_width_override
        return self.fingerprints.shape[1]

    def _query_fingerprint(self, x: np.ndarray) -> np.ndarray:
        # served vectors carry the full layout; similarity uses the fingerprint block
        if len(x) == self.fingerprints.shape[1]:
            return x
        if len(x) == self.input_width:
            return x[:self.fingerprints.shape[1]]
        raise ValueError(f"query width {len(x)} matches neither store nor layout")

    def predict_row(self, x: np.ndarray) -> np.ndarray:
        fp = self._query_fingerprint(np.asarray(x, dtype=np.float64))
        sims = tanimoto_row(fp, self.fingerprints)
        # most similar first; ties broken by store order for determinism
        order = np.argsort(-sims, kind="stable")
        out = np.empty(N_ENDPOINTS)
        for j in range(N_ENDPOINTS):
            out[j] = self._predict_endpoint(order, sims, j)
        return out

    def _predict_endpoint(self, order: np.ndarray, sims: np.ndarray, j: int) -> float:
        """Similarity-weighted mean over labeled rows among the k nearest.

        Rows without this endpoint's label are skipped; when none of the
        k nearest are labeled the window widens to the first labeled
        neighbor beyond them. With no labeled row at all: 0.5.
        """
        labeled = [i for i in order[:self.k] if self.label_mask[i, j]]
        if not labeled:
            for i in order[self.k:]:
                if self.label_mask[i, j]:
                    labeled = [i]
                    break
        if not labeled:
            return 0.5
        weights = sims[labeled]
        values = self.label_values[labeled, j]
        total = weights.sum()
        if total == 0.0:
            return float(values.mean())
        return float((weights * values).sum() / total)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return np.vstack([self.predict_row(row) for row in X])

    def arrays(self) -> list[tuple[str, np.ndarray]]:
        return [
            ("fingerprints", self.fingerprints),
            ("label_values", self.label_values),
            ("label_mask", self.label_mask.astype(np.float64)),
        ]


def build_knn(fingerprints: np.ndarray, truth: LabelMatrix, k: int = 5,
              pipeline_ref: str = "", input_width_override: int | None = None) -> KnnModel:
    fingerprints = np.asarray(fingerprints, dtype=np.float64)
    if fingerprints.shape[0] != len(truth):
        raise ValueError("fingerprint rows must match label rows")
    labels, mask = truth.labels_and_mask()
    values = np.where(mask, labels, -1.0)
    return KnnModel(fingerprints=fingerprints, label_values=values, label_mask=mask,
                    k=k, pipeline_ref=pipeline_ref,
                    input_width_override=input_width_override)


def knn_from_layout_matrix(features: np.ndarray, truth: LabelMatrix, k: int = 5,
                           pipeline_ref: str = "") -> KnnModel:
    """KNN over the fingerprint block of full-layout feature rows."""
    features = np.asarray(features, dtype=np.float64)
    fps = features[:, :LAYOUT.ecfp_width]
    return build_knn(fps, truth, k=k, pipeline_ref=pipeline_ref,
                     input_width_override=features.shape[1])

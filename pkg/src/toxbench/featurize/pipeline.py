"""Fit/apply feature pipeline: filtering, quantization, normalization.

Fit order: variance filter, then a greedy correlation filter scanning in
ascending layout order, then optional top-k-by-variance selection.
Quantization (quartile bins to bin midpoints) applies to descriptor-block
features only; normalization statistics are taken over the quantized
training matrix so train rows standardize to mean 0 / std 1 exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..hashing import canonical_json, sha256_bytes
from .layout import FEATURE_TOTAL, LAYOUT
from .sets import layout_content_hashes

STD_FLOOR = 1e-8

_MAGIC = b"TBPIPE01"


@dataclass(frozen=True)
class PipelineConfig:
    """Thresholds set to None disable the corresponding filter."""

    variance_threshold: float | None = 0.0
    correlation_threshold: float | None = 0.95
    quantize: bool = False
    normalize: bool = True
    top_k_variance: int | None = None

    def __post_init__(self):
        if self.variance_threshold is not None:
            if not np.isfinite(self.variance_threshold) or self.variance_threshold < 0:
                raise ValueError("variance_threshold must be finite and >= 0")
        if self.correlation_threshold is not None:
            if not 0 < self.correlation_threshold <= 1:
                raise ValueError("correlation_threshold must be in (0, 1]")
        if self.top_k_variance is not None and self.top_k_variance < 1:
            raise ValueError("top_k_variance must be >= 1")

    def to_dict(self) -> dict:
        return {
            "variance_threshold": self.variance_threshold,
            "correlation_threshold": self.correlation_threshold,
            "quantize": self.quantize,
            "normalize": self.normalize,
            "top_k_variance": self.top_k_variance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        return cls(**d)


@dataclass(frozen=True)
class FittedPipeline:
    config: PipelineConfig
    input_width: int
    kept_indices: np.ndarray          # strictly increasing, into the input layout
    mean: np.ndarray                  # per kept feature
    std: np.ndarray                   # per kept feature, floored on use
    quant_positions: np.ndarray       # positions within kept_indices that quantize
    quant_edges: np.ndarray           # (len(quant_positions), 5): min,q25,q50,q75,max
    metadata: dict = field(default_factory=dict)

    @property
    def output_width(self) -> int:
        return len(self.kept_indices)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return apply_pipeline(self, vector)

    def apply_matrix(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != self.input_width:
            raise LayoutMismatch(
                f"expected rows of width {self.input_width}, got {matrix.shape}")
        out = matrix[:, self.kept_indices]
        out = self._quantize(out)
        if self.config.normalize:
            out = (out - self.mean) / np.maximum(self.std, STD_FLOOR)
        return out

    def _quantize(self, selected: np.ndarray) -> np.ndarray:
        if not self.config.quantize or len(self.quant_positions) == 0:
            return selected
        out = selected.copy()
        for row, pos in enumerate(self.quant_positions):
            edges = self.quant_edges[row]
            mids = (edges[:-1] + edges[1:]) / 2.0
            values = out[..., pos]
            bins = np.searchsorted(edges[1:4], values, side="left")
            out[..., pos] = mids[bins]
        return out

    # --- serialization (byte-stable) ---

    def to_bytes(self) -> bytes:
        header = {
            "config": self.config.to_dict(),
            "input_width": int(self.input_width),
            "n_kept": int(len(self.kept_indices)),
            "n_quant": int(len(self.quant_positions)),
            "metadata": self.metadata,
        }
        head = canonical_json(header).encode("utf-8")
        parts = [
            _MAGIC,
            len(head).to_bytes(8, "little"),
            head,
            np.ascontiguousarray(self.kept_indices, dtype="<i8").tobytes(),
            np.ascontiguousarray(self.mean, dtype="<f8").tobytes(),
            np.ascontiguousarray(self.std, dtype="<f8").tobytes(),
            np.ascontiguousarray(self.quant_positions, dtype="<i8").tobytes(),
            np.ascontiguousarray(self.quant_edges, dtype="<f8").tobytes(),
        ]
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "FittedPipeline":
        if blob[:8] != _MAGIC:
            raise ValueError("not a pipeline blob (bad magic)")
        head_len = int.from_bytes(blob[8:16], "little")
        header = json.loads(blob[16:16 + head_len])
        pos = 16 + head_len
        n_kept = header["n_kept"]
        n_quant = header["n_quant"]

        def take(count, dtype):
            nonlocal pos
            size = count * 8
            arr = np.frombuffer(blob[pos:pos + size], dtype=dtype).copy()
            pos += size
            return arr

        kept = take(n_kept, "<i8")
        mean = take(n_kept, "<f8")
        std = take(n_kept, "<f8")
        quant_positions = take(n_quant, "<i8")
        quant_edges = take(n_quant * 5, "<f8").reshape(n_quant, 5)
        if pos != len(blob):
            raise ValueError("trailing bytes in pipeline blob")
        return cls(
            config=PipelineConfig.from_dict(header["config"]),
            input_width=header["input_width"],
            kept_indices=kept,
            mean=mean,
            std=std,
            quant_positions=quant_positions,
            quant_edges=quant_edges,
            metadata=header["metadata"],
        )

    def content_hash(self) -> str:
        return sha256_bytes(self.to_bytes())


class LayoutMismatch(ValueError):
    pass


def fit_pipeline(matrix: np.ndarray, cfg: PipelineConfig = PipelineConfig(),
                 quantize_slice: slice | None = None) -> FittedPipeline:
    """Fit filters and statistics on a training feature matrix.

    quantize_slice bounds the features eligible for quantization; by
    default the descriptor block of the standard layout (no features when
    the matrix has a non-standard width).
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ValueError("matrix must be 2-D and non-empty")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("matrix contains non-finite values")
    n_rows, width = matrix.shape

    variances = matrix.var(axis=0)
    if cfg.variance_threshold is not None:
        keep_mask = variances > cfg.variance_threshold
    else:
        keep_mask = np.ones(width, dtype=bool)
    kept = np.flatnonzero(keep_mask)

    if cfg.correlation_threshold is not None and len(kept) > 1:
        kept = _greedy_correlation_filter(matrix, kept, variances, cfg.correlation_threshold)

    if cfg.top_k_variance is not None:
        if cfg.top_k_variance > width:
            raise ValueError("top_k_variance exceeds feature count")
        if len(kept) > cfg.top_k_variance:
            # ties broken by lower layout index: sort by (-variance, index)
            ranked = sorted(kept, key=lambda i: (-variances[i], i))
            kept = np.array(sorted(ranked[:cfg.top_k_variance]), dtype=np.int64)

    kept = np.asarray(kept, dtype=np.int64)
    selected = matrix[:, kept]

    if quantize_slice is None:
        quantize_slice = LAYOUT.descriptor_slice if width == FEATURE_TOTAL else slice(0, 0)
    quant_positions = np.flatnonzero(
        (kept >= quantize_slice.start) & (kept < quantize_slice.stop)
    ).astype(np.int64) if cfg.quantize else np.empty(0, dtype=np.int64)

    quant_edges = np.empty((len(quant_positions), 5), dtype=np.float64)
    for row, pos in enumerate(quant_positions):
        col = selected[:, pos]
        quant_edges[row] = np.quantile(col, [0.0, 0.25, 0.5, 0.75, 1.0])

    pipeline = FittedPipeline(
        config=cfg,
        input_width=width,
        kept_indices=kept,
        mean=np.zeros(len(kept)),
        std=np.ones(len(kept)),
        quant_positions=quant_positions,
        quant_edges=quant_edges,
        metadata={},
    )
    transformed = pipeline._quantize(selected)
    mean = transformed.mean(axis=0)
    std = transformed.std(axis=0)

    metadata = {
        "rows": int(n_rows),
        "matrix_hash": sha256_bytes(np.ascontiguousarray(matrix, dtype="<f8").tobytes()),
        "layout": layout_content_hashes() if width == FEATURE_TOTAL else {},
    }
    return FittedPipeline(
        config=cfg,
        input_width=width,
        kept_indices=kept,
        mean=mean,
        std=std,
        quant_positions=quant_positions,
        quant_edges=quant_edges,
        metadata=metadata,
    )


def _greedy_correlation_filter(matrix, kept, variances, threshold) -> np.ndarray:
    """Scan in ascending index order; drop features too correlated with a kept one.

    Features with zero variance (possible when the variance filter is off)
    standardize to the zero column and correlate with nothing.
    """
    n_rows = matrix.shape[0]
    block = np.empty((len(kept), n_rows))
    m = 0
    survivors: list[int] = []
    for i in kept:
        col = matrix[:, i]
        sd = np.sqrt(variances[i])
        z = (col - col.mean()) / sd if sd > 0 else np.zeros(n_rows)
        if m:
            corr = np.abs(block[:m] @ z) / n_rows
            if np.any(corr > threshold):
                continue
        block[m] = z
        survivors.append(int(i))
        m += 1
    return np.array(survivors, dtype=np.int64)


def apply_pipeline(pipeline: FittedPipeline, vector: np.ndarray) -> np.ndarray:
    """Reduce one full-layout vector through a fitted pipeline."""
    vector = np.asarray(vector, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] != pipeline.input_width:
        raise LayoutMismatch(
            f"expected a vector of width {pipeline.input_width}, got {vector.shape}")
    return pipeline.apply_matrix(vector[None, :])[0]

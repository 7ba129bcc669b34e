"""Model artifact directory format.

    manifest.json   canonical JSON: kind, name/version, hyperparameters,
                    seed, array shapes, content hashes of the two blobs
    weights.bin     16-byte header (8-byte magic, u32 version, u32 array
                    count), then arrays as little-endian float64 row-major
    pipeline.bin    FittedPipeline serialization

Byte-stable across save/load; every load verifies the recorded hashes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..featurize.pipeline import FittedPipeline
from ..hashing import canonical_json, sha256_bytes
from .knn import KnnModel
from .linear import LinearModel
from .snn import SnnModel

_MAGIC = b"TBWTS001"
_FORMAT_VERSION = 1

MANIFEST_NAME = "manifest.json"
WEIGHTS_NAME = "weights.bin"
PIPELINE_NAME = "pipeline.bin"


class ArtifactError(RuntimeError):
    pass


def _encode_weights(arrays: list[tuple[str, np.ndarray]]) -> bytes:
    parts = [_MAGIC,
             _FORMAT_VERSION.to_bytes(4, "little"),
             len(arrays).to_bytes(4, "little")]
    for _, arr in arrays:
        parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return b"".join(parts)


def _decode_weights(blob: bytes, shapes: list[tuple[str, list[int]]]) -> dict[str, np.ndarray]:
    if len(blob) < 16 or blob[:8] != _MAGIC:
        raise ArtifactError("weights.bin: bad magic")
    version = int.from_bytes(blob[8:12], "little")
    if version != _FORMAT_VERSION:
        raise ArtifactError(f"weights.bin: unsupported version {version}")
    count = int.from_bytes(blob[12:16], "little")
    if count != len(shapes):
        raise ArtifactError(f"weights.bin: {count} arrays, manifest lists {len(shapes)}")
    expected = 16 + sum(int(np.prod(shape)) * 8 for _, shape in shapes)
    if len(blob) != expected:
        raise ArtifactError(
            f"weights.bin: size {len(blob)} bytes, expected {expected}")
    out = {}
    pos = 16
    for name, shape in shapes:
        size = int(np.prod(shape)) * 8
        out[name] = np.frombuffer(blob[pos:pos + size], dtype="<f8").reshape(shape).copy()
        pos += size
    return out


def save_artifact(directory, model, pipeline: FittedPipeline,
                  name: str = "toxbench-baseline", version: str = "0.1.0",
                  hyperparameters: dict | None = None, seed: int | None = None) -> Path:
    """Write manifest.json, weights.bin, and pipeline.bin into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    pipeline_blob = pipeline.to_bytes()
    pipeline_hash = sha256_bytes(pipeline_blob)
    arrays = model.arrays()
    weights_blob = _encode_weights(arrays)

    extra: dict = {}
    if isinstance(model, SnnModel):
        extra["alpha_dropout_rate"] = model.alpha_dropout_rate
        extra["layer_widths"] = model.layer_widths
    elif isinstance(model, KnnModel):
        extra["k"] = model.k
        extra["input_width_override"] = model.input_width_override

    manifest = {
        "format_version": _FORMAT_VERSION,
        "kind": model.kind,
        "name": name,
        "version": version,
        "seed": seed,
        "hyperparameters": hyperparameters or {},
        "pipeline_hash": pipeline_hash,
        "weights_hash": sha256_bytes(weights_blob),
        "arrays": [[arr_name, list(arr.shape)] for arr_name, arr in arrays],
        "extra": extra,
    }

    (directory / WEIGHTS_NAME).write_bytes(weights_blob)
    (directory / PIPELINE_NAME).write_bytes(pipeline_blob)
    (directory / MANIFEST_NAME).write_text(canonical_json(manifest) + "\n", encoding="utf-8")
    return directory


@dataclass(frozen=True)
class LoadedModel:
    model: object
    pipeline: FittedPipeline
    manifest: dict

    @property
    def name(self) -> str:
        return self.manifest["name"]

    @property
    def version(self) -> str:
        return self.manifest["version"]


def load_artifact(directory) -> LoadedModel:
    """Load and verify an artifact; any integrity problem is fatal."""
    directory = Path(directory)
    for filename in (MANIFEST_NAME, WEIGHTS_NAME, PIPELINE_NAME):
        if not (directory / filename).is_file():
            raise ArtifactError(f"missing {filename} in {directory}")

    try:
        manifest = json.loads((directory / MANIFEST_NAME).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"manifest.json: {exc}") from exc

    weights_blob = (directory / WEIGHTS_NAME).read_bytes()
    pipeline_blob = (directory / PIPELINE_NAME).read_bytes()
    if sha256_bytes(weights_blob) != manifest.get("weights_hash"):
        raise ArtifactError("weights.bin content hash does not match the manifest")
    pipeline_hash = sha256_bytes(pipeline_blob)
    if pipeline_hash != manifest.get("pipeline_hash"):
        raise ArtifactError("pipeline.bin content hash does not match the manifest")

    pipeline = FittedPipeline.from_bytes(pipeline_blob)
    shapes = [(n, s) for n, s in manifest["arrays"]]
    arrays = _decode_weights(weights_blob, shapes)
    extra = manifest.get("extra", {})
    kind = manifest.get("kind")

    if kind == "linear":
        model = LinearModel(weights=arrays["weights"], bias=arrays["bias"],
                            pipeline_ref=pipeline_hash)
    elif kind == "snn":
        n_layers = sum(1 for n in arrays if n.startswith("W"))
        model = SnnModel(
            weights=[arrays[f"W{i}"] for i in range(n_layers)],
            biases=[arrays[f"b{i}"] for i in range(n_layers)],
            alpha_dropout_rate=extra.get("alpha_dropout_rate", 0.0),
            pipeline_ref=pipeline_hash,
        )
    elif kind == "knn":
        model = KnnModel(
            fingerprints=arrays["fingerprints"],
            label_values=arrays["label_values"],
            label_mask=arrays["label_mask"].astype(bool),
            k=extra["k"],
            pipeline_ref=pipeline_hash,
            input_width_override=extra.get("input_width_override"),
        )
    else:
        raise ArtifactError(f"unknown model kind {kind!r}")

    if model.input_width != pipeline.output_width:
        raise ArtifactError(
            f"model expects width {model.input_width}, pipeline produces "
            f"{pipeline.output_width}")
    return LoadedModel(model=model, pipeline=pipeline, manifest=manifest)

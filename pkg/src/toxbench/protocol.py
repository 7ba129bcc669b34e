"""Prediction wire contract shared by server, orchestrator, and external models.

Canonical encoding sorts object keys and renders reals in shortest
round-trip form, so encode(decode(encode(x))) is byte-identical. Decoding
is structural only: value-range and coverage checks live in
validate_response so violations can be reported in full, not failed fast.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .dataset import ENDPOINTS


class WireFormatError(ValueError):
    """Structural decode failure; path names the offending JSON element."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


@dataclass(frozen=True)
class PredictRequest:
    smiles: tuple[str, ...]

    def __post_init__(self):
        if not self.smiles:
            raise ValueError("request needs at least one SMILES")
        if any(not s for s in self.smiles):
            raise ValueError("empty SMILES entry")
        if len(set(self.smiles)) != len(self.smiles):
            # the response map cannot distinguish duplicates
            raise ValueError("duplicate SMILES in one request")


@dataclass(frozen=True)
class PredictResponse:
    predictions: dict  # smiles -> endpoint -> float
    model_info: dict   # at least "name" and "version"


def encode_request(req: PredictRequest) -> bytes:
    return _canonical({"smiles": list(req.smiles)})


def decode_request(data: bytes | str) -> PredictRequest:
    doc = _load(data)
    if not isinstance(doc, dict):
        raise WireFormatError("$", "request body must be a JSON object")
    if "smiles" not in doc:
        raise WireFormatError("$", 'missing "smiles"')
    smiles = doc["smiles"]
    if not isinstance(smiles, list) or not smiles:
        raise WireFormatError("$.smiles", "must be a non-empty array")
    for i, entry in enumerate(smiles):
        if not isinstance(entry, str) or not entry:
            raise WireFormatError(f"$.smiles[{i}]", "must be a non-empty string")
    if len(set(smiles)) != len(smiles):
        raise WireFormatError("$.smiles", "duplicate entries")
    unknown = sorted(set(doc) - {"smiles"})
    if unknown:
        raise WireFormatError("$", f"unexpected keys {unknown}")
    return PredictRequest(tuple(smiles))


def encode_response(resp: PredictResponse) -> bytes:
    return _canonical({"predictions": resp.predictions, "model_info": resp.model_info})


def decode_response(data: bytes | str) -> PredictResponse:
    doc = _load(data)
    if not isinstance(doc, dict):
        raise WireFormatError("$", "response body must be a JSON object")
    for key in ("predictions", "model_info"):
        if key not in doc:
            raise WireFormatError("$", f'missing "{key}"')
    predictions = doc["predictions"]
    if not isinstance(predictions, dict):
        raise WireFormatError("$.predictions", "must be an object")
    for smiles, per_target in predictions.items():
        if not isinstance(per_target, dict):
            raise WireFormatError(f"$.predictions[{smiles!r}]", "must be an object")
        for endpoint, value in per_target.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise WireFormatError(
                    f"$.predictions[{smiles!r}][{endpoint!r}]", "must be a number")
    model_info = doc["model_info"]
    if not isinstance(model_info, dict):
        raise WireFormatError("$.model_info", "must be an object")
    for key, value in model_info.items():
        if not isinstance(value, str):
            raise WireFormatError(f"$.model_info[{key!r}]", "must be a string")
    for key in ("name", "version"):
        if key not in model_info:
            raise WireFormatError("$.model_info", f'missing "{key}"')
    unknown = sorted(set(doc) - {"predictions", "model_info"})
    if unknown:
        raise WireFormatError("$", f"unexpected keys {unknown}")
    return PredictResponse(
        predictions={s: dict(t) for s, t in predictions.items()},
        model_info=dict(model_info),
    )


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False,
                      allow_nan=True).encode("utf-8")


def _load(data: bytes | str):
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WireFormatError("$", f"not UTF-8: {exc}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise WireFormatError(f"$ (line {exc.lineno}, col {exc.colno})", exc.msg) from None


VIOLATION_KINDS = (
    "missing_molecule",
    "missing_target",
    "extra_key",
    "non_finite",
    "out_of_range",
    "malformed",
)


@dataclass(frozen=True)
class Violation:
    kind: str
    smiles: str | None = None
    endpoint: str | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "smiles": self.smiles,
                "endpoint": self.endpoint, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(
            f"{v.kind}({v.smiles or ''},{v.endpoint or ''})" for v in self.violations)


def validate_response(req: PredictRequest, resp: PredictResponse) -> ValidationReport:
    """Completeness and value checks; every violation is reported, none raised."""
    violations: list[Violation] = []
    endpoint_set = set(ENDPOINTS)

    for smiles in req.smiles:
        if smiles not in resp.predictions:
            violations.append(Violation("missing_molecule", smiles=smiles,
                                        detail="no predictions for requested SMILES"))
            continue
        per_target = resp.predictions[smiles]
        if not isinstance(per_target, dict):
            violations.append(Violation("malformed", smiles=smiles,
                                        detail="predictions entry is not a mapping"))
            continue
        for endpoint in ENDPOINTS:
            if endpoint not in per_target:
                violations.append(Violation("missing_target", smiles=smiles, endpoint=endpoint,
                                            detail="endpoint absent"))
                continue
            value = per_target[endpoint]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                violations.append(Violation("malformed", smiles=smiles, endpoint=endpoint,
                                            detail=f"value {value!r} is not a number"))
            elif not math.isfinite(value):
                violations.append(Violation("non_finite", smiles=smiles, endpoint=endpoint,
                                            detail=f"value {value!r}"))
            elif not 0.0 <= value <= 1.0:
                violations.append(Violation("out_of_range", smiles=smiles, endpoint=endpoint,
                                            detail=f"value {value!r} outside [0, 1]"))
        for endpoint in sorted(set(per_target) - endpoint_set):
            violations.append(Violation("extra_key", smiles=smiles, endpoint=endpoint,
                                        detail="unknown endpoint key"))

    requested = set(req.smiles)
    for smiles in sorted(set(resp.predictions) - requested):
        violations.append(Violation("extra_key", smiles=smiles,
                                    detail="predictions for unrequested SMILES"))
    return ValidationReport(tuple(violations))


def make_error_body(path: str, message: str) -> bytes:
    return _canonical({"error": {"path": path, "message": message}})

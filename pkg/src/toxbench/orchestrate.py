"""Remote-endpoint evaluation: batch, retry, merge, validate, score.

The orchestrator deduplicates SMILES before sending (the wire protocol
forbids duplicates in one request), fans merged predictions back out to
id-keyed rows, validates full molecule x endpoint coverage, and scores
with the masked metric. Merging is keyed by SMILES, so results are
independent of batch size and arrival order.
"""

from __future__ import annotations

import concurrent.futures
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field

import numpy as np

from .dataset import ENDPOINTS, LabelMatrix, N_ENDPOINTS
from .hashing import sha256_file
from .metrics import AggregateScore, RunScore, UndefinedAUC, aggregate_runs, score_run
from .protocol import (
    PredictRequest,
    PredictResponse,
    ValidationReport,
    WireFormatError,
    decode_response,
    encode_request,
    validate_response,
)

STATUS_SCORED = "scored"
STATUS_REJECTED = "rejected"
STATUS_FAILED = "failed"


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_base: float = 1.0
    backoff_factor: float = 2.0

    def delay(self, attempt: int) -> float:
        """Seconds to wait after a failed attempt (0-based)."""
        return self.backoff_base * self.backoff_factor ** attempt


@dataclass(frozen=True)
class DatasetRef:
    path: str
    content_hash: str

    @classmethod
    def of(cls, path) -> "DatasetRef":
        return cls(str(path), sha256_file(path))


@dataclass(frozen=True)
class EvaluationJob:
    submission_id: str
    endpoint_url: str
    dataset_ref: DatasetRef
    batch_size: int = 64
    retry: RetryPolicy = RetryPolicy()
    timeout_s: float = 30.0
    max_in_flight: int = 4

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.endpoint_url.startswith(("http://", "https://")):
            raise ValueError(f"endpoint URL {self.endpoint_url!r} is not http(s)")


@dataclass(frozen=True)
class EvaluationResult:
    submission_id: str
    status: str
    run_score: RunScore | None
    validation: ValidationReport | None
    dataset_hash: str
    request_count: int
    wall_clock_s: float
    backoff_log: tuple[tuple[int, float], ...] = ()  # (batch index, delay)
    error: str = ""
    model_info: dict = field(default_factory=dict)

    @property
    def mean_auc(self) -> float | None:
        return self.run_score.mean_auc if self.run_score else None

    def to_dict(self) -> dict:
        return {
            "submission_id": self.submission_id,
            "status": self.status,
            "mean_auc": self.mean_auc,
            "per_endpoint": self.run_score.auc_map() if self.run_score else None,
            "validation": self.validation.to_dict() if self.validation else None,
            "dataset_hash": self.dataset_hash,
            "request_count": self.request_count,
            "wall_clock_s": self.wall_clock_s,
            "backoff_log": [list(x) for x in self.backoff_log],
            "error": self.error,
            "model_info": self.model_info,
        }


class HttpClient:
    """Minimal POST-JSON client; swap out in tests."""

    def post(self, url: str, body: bytes, timeout_s: float) -> tuple[int, bytes]:
        request = urllib.request.Request(
            url, data=body, headers={"Content-Type": "application/json"}, method="POST")
        try:
            with urllib.request.urlopen(request, timeout=timeout_s) as resp:
                return resp.status, resp.read()
        except urllib.error.HTTPError as exc:
            return exc.code, exc.read()


class TransportError(RuntimeError):
    pass


def plan_batches(smiles: list[str], batch_size: int) -> list[list[str]]:
    """Contiguous chunks of at most batch_size covering the list exactly once."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    return [smiles[i:i + batch_size] for i in range(0, len(smiles), batch_size)]


def dedupe_preserving_order(smiles) -> list[str]:
    seen = set()
    out = []
    for s in smiles:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def _post_with_retries(client, job: EvaluationJob, batch_index: int, batch: list[str],
                       sleep, backoff_log: list) -> PredictResponse:
    body = encode_request(PredictRequest(tuple(batch)))
    url = job.endpoint_url.rstrip("/") + "/predict"
    last_error = "no attempt made"
    for attempt in range(job.retry.max_attempts):
        try:
            status, payload = client.post(url, body, job.timeout_s)
            if status == 200:
                return decode_response(payload)
            last_error = f"HTTP {status}: {payload[:200]!r}"
        except WireFormatError as exc:
            last_error = f"undecodable response: {exc}"
        except Exception as exc:
            last_error = f"transport: {exc}"
        if attempt + 1 < job.retry.max_attempts:
            delay = job.retry.delay(attempt)
            backoff_log.append((batch_index, delay))
            sleep(delay)
    raise TransportError(
        f"batch {batch_index}: {job.retry.max_attempts} attempts exhausted; last: {last_error}")


def run_evaluation(job: EvaluationJob, dataset: LabelMatrix,
                   client: HttpClient | None = None, sleep=time.sleep) -> EvaluationResult:
    """Evaluate one endpoint against a dataset; never scores partial coverage."""
    client = client or HttpClient()
    started = time.monotonic()
    backoff_log: list[tuple[int, float]] = []

    current_hash = sha256_file(job.dataset_ref.path)
    if current_hash != job.dataset_ref.content_hash:
        return _failed(job, started, 0, backoff_log,
                       f"dataset changed on disk: {current_hash} != {job.dataset_ref.content_hash}")

    unique = dedupe_preserving_order(dataset.smiles)
    if not unique:
        return _failed(job, started, 0, backoff_log, "dataset has no molecules")
    batches = plan_batches(unique, job.batch_size)

    merged: dict[str, dict[str, float]] = {}
    model_info: dict = {}
    request_count = 0
    try:
        if job.max_in_flight > 1 and len(batches) > 1:
            with concurrent.futures.ThreadPoolExecutor(job.max_in_flight) as pool:
                futures = {
                    pool.submit(_post_with_retries, client, job, i, batch, sleep, backoff_log): i
                    for i, batch in enumerate(batches)
                }
                responses = [None] * len(batches)
                for future in concurrent.futures.as_completed(futures):
                    responses[futures[future]] = future.result()
        else:
            responses = [
                _post_with_retries(client, job, i, batch, sleep, backoff_log)
                for i, batch in enumerate(batches)
            ]
        request_count = len(batches)
    except TransportError as exc:
        return _failed(job, started, request_count, backoff_log, str(exc))

    for response in responses:
        merged.update(response.predictions)
        model_info = response.model_info

    full_request = PredictRequest(tuple(unique))
    merged_response = PredictResponse(predictions=merged, model_info=model_info)
    validation = validate_response(full_request, merged_response)
    if not validation.ok:
        return EvaluationResult(
            submission_id=job.submission_id, status=STATUS_REJECTED, run_score=None,
            validation=validation, dataset_hash=job.dataset_ref.content_hash,
            request_count=request_count, wall_clock_s=time.monotonic() - started,
            backoff_log=tuple(backoff_log), model_info=model_info)

    # fan merged predictions back out to id-keyed rows
    predictions = np.empty((len(dataset), N_ENDPOINTS))
    for i, smiles in enumerate(dataset.smiles):
        per_target = merged[smiles]
        for j, endpoint in enumerate(ENDPOINTS):
            predictions[i, j] = per_target[endpoint]

    try:
        run_score = score_run(predictions, dataset)
    except UndefinedAUC as exc:
        return _failed(job, started, request_count, backoff_log,
                       f"scoring failed: {exc} (endpoint {exc.endpoint})")

    return EvaluationResult(
        submission_id=job.submission_id, status=STATUS_SCORED, run_score=run_score,
        validation=validation, dataset_hash=job.dataset_ref.content_hash,
        request_count=request_count, wall_clock_s=time.monotonic() - started,
        backoff_log=tuple(backoff_log), model_info=model_info)


def _failed(job, started, request_count, backoff_log, error) -> EvaluationResult:
    return EvaluationResult(
        submission_id=job.submission_id, status=STATUS_FAILED, run_score=None,
        validation=None, dataset_hash=job.dataset_ref.content_hash,
        request_count=request_count, wall_clock_s=time.monotonic() - started,
        backoff_log=tuple(backoff_log), error=error)


class RerunAborted(RuntimeError):
    """At least one rerun did not score; statuses listed per run."""

    def __init__(self, statuses: list[str]):
        super().__init__(f"aggregation refused; per-run statuses: {statuses}")
        self.statuses = statuses


def rerun_protocol(jobs: list[EvaluationJob], dataset: LabelMatrix,
                   client: HttpClient | None = None,
                   sleep=time.sleep) -> tuple[AggregateScore, list[EvaluationResult]]:
    """Evaluate artifact variants (one job per seed/endpoint) and aggregate.

    Inference is deterministic, so seed variation lives in the artifacts
    behind each job's endpoint. Any non-scored run aborts aggregation.
    """
    if not jobs:
        raise ValueError("need at least one job")
    results = [run_evaluation(job, dataset, client, sleep) for job in jobs]
    statuses = [r.status for r in results]
    if any(s != STATUS_SCORED for s in statuses):
        raise RerunAborted(statuses)
    aggregate = aggregate_runs([r.run_score.mean_auc for r in results])
    return aggregate, results

"""Submission registry: model cards, verification lifecycle, leaderboard queries.

Persistence is an append-only JSON-lines event log; queryable state is a
pure fold over the events, so replaying the log from empty reproduces the
state exactly (including timestamps, which live in the events). One event
per line: submission_created, evaluation_started, result_attached,
reviewed.
"""

from __future__ import annotations

import json
import platform
import sys
import threading
import time
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from urllib.parse import urlparse

from ..hashing import canonical_json, sha256_json

PENDING = "pending"
EVALUATING = "evaluating"
PRELIMINARY = "preliminary"
APPROVED = "approved"
REJECTED = "rejected"
FAILED = "failed"

STATUSES = (PENDING, EVALUATING, PRELIMINARY, APPROVED, REJECTED, FAILED)
TERMINAL_STATUSES = (APPROVED, REJECTED, FAILED)

# legal lifecycle moves; review decisions are reachable only from preliminary
TRANSITIONS: dict[str, frozenset] = {
    PENDING: frozenset({EVALUATING}),
    EVALUATING: frozenset({PRELIMINARY, REJECTED, FAILED}),
    PRELIMINARY: frozenset({APPROVED, REJECTED}),
    APPROVED: frozenset(),
    REJECTED: frozenset(),
    FAILED: frozenset(),
}

REQUIRED_CARD_FIELDS = (
    "model_name", "developer", "architecture", "model_version", "space_url", "commit_hash",
)

RECORD_VERSION = 1


class RegistryError(ValueError):
    pass


class IllegalTransition(RegistryError):
    def __init__(self, submission_id: int, current: str, wanted: str):
        super().__init__(f"submission {submission_id}: {current} -> {wanted} is not allowed")
        self.current = current
        self.wanted = wanted


class CardValidationError(RegistryError):
    def __init__(self, problems: list[str]):
        super().__init__("invalid model card: " + "; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class ModelCard:
    model_name: str = ""
    developer: str = ""
    paper_url: str = ""
    architecture: str = ""
    inference_notes: str = ""
    model_version: str = ""
    model_date: str = ""
    reproducibility_statement: str = ""
    intended_use: str = ""
    metric: str = ""
    training_data: str = ""
    evaluation_data: str = ""
    space_url: str = ""
    commit_hash: str = ""

    def problems(self) -> list[str]:
        out = [f"missing required field: {name}"
               for name in REQUIRED_CARD_FIELDS if not getattr(self, name).strip()]
        if self.space_url.strip():
            parsed = urlparse(self.space_url)
            if parsed.scheme not in ("http", "https") or not parsed.netloc:
                out.append(f"space_url does not parse as a URL: {self.space_url!r}")
        return out

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelCard":
        allowed = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - allowed)
        if unknown:
            raise CardValidationError([f"unknown card field: {k}" for k in unknown])
        bad_type = [k for k, v in d.items() if not isinstance(v, str)]
        if bad_type:
            raise CardValidationError([f"card field must be a string: {k}" for k in bad_type])
        return cls(**d)


@dataclass
class Submission:
    id: int
    card: ModelCard
    status: str = PENDING
    result: dict | None = None
    review_decision: str | None = None
    reviewer: str | None = None
    review_note: str | None = None
    timestamps: dict = field(default_factory=dict)  # status -> iso time

    @property
    def mean_auc(self) -> float | None:
        if self.result:
            return self.result.get("mean_auc")
        return None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "card": self.card.to_dict(),
            "status": self.status,
            "result": self.result,
            "review_decision": self.review_decision,
            "reviewer": self.reviewer,
            "review_note": self.review_note,
            "timestamps": dict(self.timestamps),
        }


def platform_fingerprint() -> dict:
    return {"python": sys.version.split()[0], "platform": platform.platform()}


def _iso(ts: float) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()


class RegistryStore:
    """Single-writer event log with replayed in-memory state.

    Mutations are serialized through one lock; reads return snapshots of
    immutable values and never block writers for long.
    """

    def __init__(self, log_path=None, clock=time.time):
        self._lock = threading.Lock()
        self._clock = clock
        self._log_path = Path(log_path) if log_path else None
        self._events: list[dict] = []
        self._submissions: dict[int, Submission] = {}
        self._result_records: list[dict] = []
        self._next_id = 1
        if self._log_path and self._log_path.exists():
            with open(self._log_path, "r", encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if line:
                        self._apply(json.loads(line))

    # --- event plumbing ---

    def _append(self, event: dict) -> None:
        event = {"seq": len(self._events) + 1, "at": _iso(self._clock()), **event}
        self._apply(event)
        if self._log_path:
            with open(self._log_path, "a", encoding="utf-8") as f:
                f.write(canonical_json(event) + "\n")

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "submission_created":
            card = ModelCard.from_dict(event["card"])
            sub = Submission(id=event["submission_id"], card=card)
            sub.timestamps[PENDING] = event["at"]
            self._submissions[sub.id] = sub
            self._next_id = max(self._next_id, sub.id + 1)
        elif kind == "evaluation_started":
            sub = self._submissions[event["submission_id"]]
            sub.status = EVALUATING
            sub.timestamps[EVALUATING] = event["at"]
        elif kind == "result_attached":
            sub = self._submissions[event["submission_id"]]
            sub.result = event["record"]["result"]
            sub.status = event["new_status"]
            sub.timestamps[sub.status] = event["at"]
            self._result_records.append(event["record"])
        elif kind == "reviewed":
            sub = self._submissions[event["submission_id"]]
            sub.status = APPROVED if event["decision"] == "approve" else REJECTED
            sub.review_decision = event["decision"]
            sub.reviewer = event["reviewer"]
            sub.review_note = event.get("note")
            sub.timestamps[sub.status] = event["at"]
        else:
            raise RegistryError(f"unknown event kind {kind!r}")
        self._events.append(event)

    # --- operations ---

    def submit(self, card: ModelCard) -> Submission:
        problems = card.problems()
        if problems:
            raise CardValidationError(problems)
        with self._lock:
            submission_id = self._next_id
            self._append({
                "event": "submission_created",
                "submission_id": submission_id,
                "card": card.to_dict(),
            })
            return self.get(submission_id)

    def start_evaluation(self, submission_id: int) -> Submission:
        with self._lock:
            self._require_transition(submission_id, EVALUATING)
            self._append({"event": "evaluation_started", "submission_id": submission_id})
            return self.get(submission_id)

    def attach_result(self, submission_id: int, result: dict) -> Submission:
        """Scored results become preliminary; rejected/failed propagate."""
        status_map = {"scored": PRELIMINARY, "rejected": REJECTED, "failed": FAILED}
        result_status = result.get("status")
        if result_status not in status_map:
            raise RegistryError(f"result status must be one of {sorted(status_map)}")
        new_status = status_map[result_status]
        with self._lock:
            self._require_transition(submission_id, new_status)
            record = {
                "submission_id": submission_id,
                "result": result,
                "dataset_hash": result.get("dataset_hash", ""),
                "platform": platform_fingerprint(),
                "created_at": _iso(self._clock()),
                "record_version": RECORD_VERSION,
            }
            self._append({
                "event": "result_attached",
                "submission_id": submission_id,
                "new_status": new_status,
                "record": record,
            })
            return self.get(submission_id)

    def review(self, submission_id: int, decision: str, reviewer: str,
               note: str = "") -> Submission:
        if decision not in ("approve", "reject"):
            raise RegistryError("decision must be 'approve' or 'reject'")
        if not reviewer.strip():
            raise RegistryError("reviewer must be non-empty")
        wanted = APPROVED if decision == "approve" else REJECTED
        with self._lock:
            sub = self._get_or_raise(submission_id)
            if sub.status != PRELIMINARY or wanted not in TRANSITIONS[sub.status]:
                raise IllegalTransition(submission_id, sub.status, wanted)
            self._append({
                "event": "reviewed",
                "submission_id": submission_id,
                "decision": decision,
                "reviewer": reviewer,
                "note": note,
            })
            return self.get(submission_id)

    def _require_transition(self, submission_id: int, wanted: str) -> None:
        sub = self._get_or_raise(submission_id)
        if wanted not in TRANSITIONS[sub.status]:
            raise IllegalTransition(submission_id, sub.status, wanted)

    def _get_or_raise(self, submission_id: int) -> Submission:
        if submission_id not in self._submissions:
            raise RegistryError(f"no submission {submission_id}")
        return self._submissions[submission_id]

    # --- queries ---

    def get(self, submission_id: int) -> Submission:
        return self._get_or_raise(submission_id)

    def submissions(self) -> list[Submission]:
        return [self._submissions[k] for k in sorted(self._submissions)]

    def result_records(self) -> list[dict]:
        return list(self._result_records)

    def events(self) -> list[dict]:
        return list(self._events)

    def query_leaderboard(self, statuses=(APPROVED,), text: str | None = None,
                          sort_key: str = "mean_auc", descending: bool = True) -> list[dict]:
        """Filtered, sorted rows; default view is approved-only by mean AUC.

        Ties break toward the earlier submission.
        """
        statuses = set(statuses)
        unknown = statuses - set(STATUSES)
        if unknown:
            raise RegistryError(f"unknown statuses {sorted(unknown)}")
        if sort_key not in ("mean_auc", "date", "name"):
            raise RegistryError(f"unknown sort key {sort_key!r}")

        rows = []
        for sub in self.submissions():
            if sub.status not in statuses:
                continue
            if text:
                needle = text.lower()
                if needle not in sub.card.model_name.lower() \
                        and needle not in sub.card.developer.lower():
                    continue
            rows.append({
                "id": sub.id,
                "model_name": sub.card.model_name,
                "developer": sub.card.developer,
                "status": sub.status,
                "mean_auc": sub.mean_auc,
                "per_endpoint": (sub.result or {}).get("per_endpoint"),
                "submitted_at": sub.timestamps.get(PENDING, ""),
            })

        def key(row):
            if sort_key == "mean_auc":
                primary = row["mean_auc"] if row["mean_auc"] is not None else float("-inf")
            elif sort_key == "date":
                primary = row["submitted_at"]
            else:
                primary = row["model_name"].lower()
            return primary

        # two-pass sort keeps the id tie-break stable under either direction
        rows.sort(key=lambda r: r["id"])
        rows.sort(key=key, reverse=descending)
        return rows

    def state_hash(self) -> str:
        """Content hash of the queryable state (replay determinism check)."""
        state = {
            "submissions": [s.to_dict() for s in self.submissions()],
            "results": self._result_records,
        }
        return sha256_json(state)

"""HTTP API over the registry store, plus static hosting for the web console.

Routes:
    POST /submissions                 model card JSON -> 201 {"id": n}
    GET  /submissions/{id}
    POST /submissions/{id}/start      admin: pending -> evaluating
    POST /submissions/{id}/result     admin: attach an evaluation result
    POST /submissions/{id}/review     admin: {"decision", "reviewer", "note"}
    GET  /leaderboard?status=&sort=&dir=&q=
    GET  /healthz
    GET  /ui/...                      static files (when a UI dir is configured)

The admin token comes from TOXBENCH_ADMIN_TOKEN (or the constructor) and
is required in the X-Admin-Token header for reviews, lifecycle mutations,
and any leaderboard view beyond approved rows.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import os
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .store import (
    APPROVED,
    CardValidationError,
    IllegalTransition,
    ModelCard,
    RegistryError,
    RegistryStore,
)

log = logging.getLogger("toxbench.registry")

ADMIN_TOKEN_ENV = "TOXBENCH_ADMIN_TOKEN"


def _json_body(payload: dict, status: int = 200) -> tuple[int, bytes, str]:
    return status, json.dumps(payload).encode("utf-8"), "application/json"


def _error(status: int, message: str, **extra) -> tuple[int, bytes, str]:
    return _json_body({"error": {"message": message, **extra}}, status)


class RegistryApi:
    """Transport-independent request handling (shared by server and tests)."""

    def __init__(self, store: RegistryStore, admin_token: str | None = None,
                 ui_dir: str | None = None):
        self.store = store
        self.admin_token = admin_token if admin_token is not None \
            else os.environ.get(ADMIN_TOKEN_ENV, "")
        self.ui_dir = Path(ui_dir) if ui_dir else None

    def _is_admin(self, headers) -> bool:
        return bool(self.admin_token) and headers.get("X-Admin-Token") == self.admin_token

    def handle(self, method: str, path: str, query: dict, headers, body: bytes):
        try:
            return self._route(method, path, query, headers, body)
        except CardValidationError as exc:
            return _error(400, str(exc), problems=exc.problems)
        except IllegalTransition as exc:
            return _error(409, str(exc))
        except RegistryError as exc:
            return _error(400, str(exc))
        except json.JSONDecodeError as exc:
            return _error(422, f"invalid JSON body: {exc}")

    def _route(self, method: str, path: str, query: dict, headers, body: bytes):
        parts = [p for p in path.split("/") if p]

        if method == "GET" and path == "/healthz":
            return _json_body({"service": "toxbench-registry",
                               "submissions": len(self.store.submissions())})

        if method == "POST" and parts == ["submissions"]:
            card = ModelCard.from_dict(json.loads(body.decode("utf-8")))
            submission = self.store.submit(card)
            return _json_body({"id": submission.id, "status": submission.status}, 201)

        if method == "GET" and len(parts) == 2 and parts[0] == "submissions":
            submission = self.store.get(self._sub_id(parts[1]))
            return _json_body(submission.to_dict())

        if method == "POST" and len(parts) == 3 and parts[0] == "submissions":
            if not self._is_admin(headers):
                return _error(401, "admin token required")
            sub_id = self._sub_id(parts[1])
            action = parts[2]
            if action == "start":
                submission = self.store.start_evaluation(sub_id)
            elif action == "result":
                submission = self.store.attach_result(
                    sub_id, json.loads(body.decode("utf-8")))
            elif action == "review":
                doc = json.loads(body.decode("utf-8"))
                submission = self.store.review(
                    sub_id, doc.get("decision", ""), doc.get("reviewer", ""),
                    doc.get("note", ""))
            else:
                return _error(404, f"unknown action {action!r}")
            return _json_body(submission.to_dict())

        if method == "GET" and parts == ["leaderboard"]:
            statuses = query.get("status", [""])[0]
            status_set = tuple(s for s in statuses.split(",") if s) or (APPROVED,)
            if set(status_set) != {APPROVED} and not self._is_admin(headers):
                return _error(401, "admin token required for non-approved rows")
            sort_key = query.get("sort", ["mean_auc"])[0]
            direction = query.get("dir", ["desc"])[0]
            rows = self.store.query_leaderboard(
                statuses=status_set,
                text=query.get("q", [None])[0],
                sort_key=sort_key,
                descending=direction != "asc",
            )
            return _json_body({"rows": rows})

        if method == "GET" and parts and parts[0] == "ui":
            return self._static(parts[1:])

        return _error(404, f"no route for {method} {path}")

    def _static(self, parts: list[str]):
        if self.ui_dir is None:
            return _error(404, "no UI directory configured")
        rel = Path(*parts) if parts else Path("index.html")
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())):
            return _error(404, "path escapes UI directory")
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            return _error(404, f"no such file {rel}")
        content_type = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        return 200, target.read_bytes(), content_type

    @staticmethod
    def _sub_id(text: str) -> int:
        try:
            return int(text)
        except ValueError:
            raise RegistryError(f"submission id must be an integer, got {text!r}") from None


def _make_handler(api: RegistryApi):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            log.debug("%s " + fmt, self.address_string(), *args)

        def _dispatch(self, method: str):
            parsed = urlparse(self.path)
            length = int(self.headers.get("Content-Length", "0"))
            body = self.rfile.read(length) if length else b""
            try:
                status, payload, content_type = api.handle(
                    method, parsed.path, parse_qs(parsed.query), self.headers, body)
            except Exception:
                log.exception("internal error on %s %s", method, self.path)
                status, payload, content_type = _error(500, "internal error")
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def do_GET(self):
            self._dispatch("GET")

        def do_POST(self):
            self._dispatch("POST")

    return Handler


class RegistryServer:
    def __init__(self, store: RegistryStore, host: str = "127.0.0.1", port: int = 0,
                 admin_token: str | None = None, ui_dir: str | None = None):
        self.api = RegistryApi(store, admin_token=admin_token, ui_dir=ui_dir)
        self._httpd = ThreadingHTTPServer((host, port), _make_handler(self.api))

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def serve_forever(self):
        log.info("registry listening on %s", self.base_url)
        self._httpd.serve_forever()

    def shutdown(self):
        self._httpd.shutdown()
        self._httpd.server_close()


@contextmanager
def running_registry(store: RegistryStore, **kwargs):
    server = RegistryServer(store, **kwargs)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        thread.join(timeout=5)

"""HTTP model server answering POST /predict per the wire contract.

The loaded model is immutable; requests are independent and every
molecule is predicted on its own, so a SMILES gets the same probabilities
whether it arrives alone or in any batch. Unparseable SMILES fall back to
a fixed probability for all endpoints (the contract requires complete
coverage); each fallback is logged and counted.

Extra operational endpoints: GET /healthz (model name/version) and
GET /metricsz (request/fallback counters).
"""

from __future__ import annotations

import json
import logging
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from .chem import ParseError, parse_smiles
from .dataset import ENDPOINTS
from .featurize import assemble
from .models.artifact import LoadedModel, load_artifact
from .protocol import (
    PredictRequest,
    PredictResponse,
    WireFormatError,
    decode_request,
    encode_response,
    make_error_body,
)

log = logging.getLogger("toxbench.serve")


@dataclass(frozen=True)
class ServerConfig:
    artifact_path: str
    host: str = "127.0.0.1"
    port: int = 0  # 0 = pick a free port
    fallback_probability: float = 0.5
    max_batch: int = 4096
    log_path: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.fallback_probability <= 1.0:
            raise ValueError("fallback_probability must be in [0, 1]")
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")


class Predictor:
    """Deterministic per-molecule prediction over a loaded artifact."""

    def __init__(self, loaded: LoadedModel, fallback_probability: float = 0.5):
        self.loaded = loaded
        self.fallback_probability = fallback_probability

    def predict_one(self, smiles: str) -> tuple[dict[str, float], bool]:
        """({endpoint: probability}, used_fallback)."""
        try:
            mol = parse_smiles(smiles)
        except ParseError as exc:
            log.warning("fallback for unparseable SMILES %r: %s", smiles, exc)
            return {e: self.fallback_probability for e in ENDPOINTS}, True
        vector = assemble(mol)
        reduced = self.loaded.pipeline.apply(vector)
        probs = np.clip(self.loaded.model.predict_row(reduced), 0.0, 1.0)
        return {e: float(p) for e, p in zip(ENDPOINTS, probs)}, False

    def handle(self, req: PredictRequest) -> tuple[PredictResponse, int]:
        predictions = {}
        fallbacks = 0
        for smiles in req.smiles:
            predictions[smiles], used_fallback = self.predict_one(smiles)
            fallbacks += int(used_fallback)
        resp = PredictResponse(
            predictions=predictions,
            model_info={"name": self.loaded.name, "version": self.loaded.version},
        )
        return resp, fallbacks


def handle_predict(loaded: LoadedModel, req: PredictRequest,
                   fallback_probability: float = 0.5) -> PredictResponse:
    """One-shot prediction for a decoded request (the server's core path)."""
    return Predictor(loaded, fallback_probability).handle(req)[0]


class _Counters:
    def __init__(self):
        self.lock = threading.Lock()
        self.requests = 0
        self.molecules = 0
        self.fallbacks = 0

    def record(self, batch: int, fallbacks: int) -> int:
        with self.lock:
            self.requests += 1
            self.molecules += batch
            self.fallbacks += fallbacks
            return self.requests

    def snapshot(self) -> dict:
        with self.lock:
            return {"requests": self.requests, "molecules": self.molecules,
                    "fallbacks": self.fallbacks}


def _make_handler(predictor: Predictor, config: ServerConfig, counters: _Counters):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # route through logging, not stderr
            log.debug("%s " + fmt, self.address_string(), *args)

        def _send(self, status: int, body: bytes) -> None:
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == "/healthz":
                body = json.dumps({"name": predictor.loaded.name,
                                   "version": predictor.loaded.version,
                                   "kind": predictor.loaded.manifest.get("kind")}).encode()
                self._send(200, body)
            elif self.path == "/metricsz":
                self._send(200, json.dumps(counters.snapshot()).encode())
            else:
                self._send(404, make_error_body(self.path, "not found"))

        def do_POST(self):
            if self.path != "/predict":
                self._send(404, make_error_body(self.path, "not found"))
                return
            started = time.monotonic()
            try:
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length)
                try:
                    request = decode_request(raw)
                except WireFormatError as exc:
                    self._send(422, make_error_body(exc.path, exc.reason))
                    return
                if len(request.smiles) > config.max_batch:
                    self._send(422, make_error_body(
                        "$.smiles", f"batch of {len(request.smiles)} exceeds "
                                    f"max_batch {config.max_batch}"))
                    return
                response, fallbacks = predictor.handle(request)
                body = encode_response(response)
                request_id = counters.record(len(request.smiles), fallbacks)
                self._send(200, body)
                log.info(
                    "request=%d batch=%d latency_ms=%.1f fallbacks=%d",
                    request_id, len(request.smiles),
                    (time.monotonic() - started) * 1000.0, fallbacks)
            except Exception:
                log.exception("internal error serving /predict")
                self._send(500, make_error_body("$", "internal error"))

    return Handler


class ModelServer:
    """Threaded HTTP server bound to a loaded artifact."""

    def __init__(self, config: ServerConfig):
        if config.log_path:
            handler = logging.FileHandler(config.log_path)
            handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
            log.addHandler(handler)
            log.setLevel(logging.INFO)
        self.config = config
        self.loaded = load_artifact(config.artifact_path)  # fatal before the socket opens
        self.predictor = Predictor(self.loaded, config.fallback_probability)
        self.counters = _Counters()
        self._httpd = ThreadingHTTPServer(
            (config.host, config.port),
            _make_handler(self.predictor, config, self.counters))

    @property
    def address(self) -> tuple[str, int]:
        return self._httpd.server_address[:2]

    @property
    def base_url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def serve_forever(self):
        log.info("serving %s %s on %s", self.loaded.name, self.loaded.version, self.base_url)
        self._httpd.serve_forever()

    def shutdown(self):
        self._httpd.shutdown()
        self._httpd.server_close()


@contextmanager
def running_server(config: ServerConfig):
    """Start a server on a background thread; yields the ModelServer."""
    server = ModelServer(config)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        thread.join(timeout=5)

"""Command-line entry point: featurize, train, serve, eval, audit, registry ops.

Every subcommand accepts --json for a single machine-readable document on
stdout. Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import DatasetError, audit, load_dataset
from .featurize import PipelineConfig, assemble_matrix, fit_pipeline
from .metrics import format_auc
from .models import (
    ArtifactError,
    TrainConfig,
    TrainingDiverged,
    knn_from_layout_matrix,
    save_artifact,
    train_linear,
    train_snn,
)
from .orchestrate import DatasetRef, EvaluationJob, RetryPolicy, run_evaluation
from .registry import ADMIN_TOKEN_ENV, RegistryError, RegistryServer, RegistryStore
from .serve import ModelServer, ServerConfig

log = logging.getLogger("toxbench.cli")


class CliError(RuntimeError):
    pass


def _read_config(path: str | None) -> dict:
    """key=value lines, '#' comments; values parsed as JSON when possible."""
    if not path:
        return {}
    config = {}
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        try:
            config[key.strip()] = json.loads(value.strip())
        except json.JSONDecodeError:
            config[key.strip()] = value.strip()
    return config


def _pick(args, config: dict, key: str, default):
    """Explicit flag > config file > built-in default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _emit(args, doc: dict, human: str) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(human)


def _http(method: str, url: str, body: dict | None = None,
          token: str | None = None) -> dict:
    data = json.dumps(body).encode("utf-8") if body is not None else None
    headers = {"Content-Type": "application/json"}
    if token:
        headers["X-Admin-Token"] = token
    request = urllib.request.Request(url, data=data, headers=headers, method=method)
    try:
        with urllib.request.urlopen(request, timeout=30) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        payload = exc.read().decode("utf-8", "replace")
        try:
            detail = json.loads(payload).get("error", {}).get("message", payload)
        except json.JSONDecodeError:
            detail = payload
        raise CliError(f"{method} {url} -> HTTP {exc.code}: {detail}") from None
    except urllib.error.URLError as exc:
        raise CliError(f"{method} {url} failed: {exc.reason}") from None


# --- subcommands ---


def cmd_featurize(args, config) -> int:
    from .chem import parse_smiles

    matrix, report = load_dataset(args.data)
    mols = [parse_smiles(s) for s in matrix.smiles]
    features = assemble_matrix(mols)
    np.save(args.out, features)
    _emit(args, {"rows": features.shape[0], "width": features.shape[1],
                 "excluded": report.rows_excluded, "out": str(args.out)},
          f"wrote {features.shape[0]} x {features.shape[1]} feature matrix to {args.out} "
          f"({report.rows_excluded} rows excluded)")
    return 0


def _pipeline_config(args, config) -> PipelineConfig:
    return PipelineConfig(
        variance_threshold=_pick(args, config, "variance_threshold", 0.0),
        correlation_threshold=_pick(args, config, "correlation_threshold", 0.95),
        quantize=bool(_pick(args, config, "quantize", False)),
        normalize=not args.no_normalize,
        top_k_variance=_pick(args, config, "top_k_variance", None),
    )


def cmd_train(args, config) -> int:
    from .chem import parse_smiles

    truth, report = load_dataset(args.data)
    if report.rows_excluded:
        log.warning("%d rows excluded at load", report.rows_excluded)
    mols = [parse_smiles(s) for s in truth.smiles]
    features = assemble_matrix(mols)

    seed = int(_pick(args, config, "seed", 0))
    hyper = TrainConfig(
        learning_rate=float(_pick(args, config, "learning_rate", 0.1)),
        l2=float(_pick(args, config, "l2", 1e-4)),
        epochs=int(_pick(args, config, "epochs", 60)),
        batch_size=int(_pick(args, config, "batch_size", 64)),
        seed=seed,
        momentum=float(_pick(args, config, "momentum", 0.9)),
    )

    if args.model == "knn":
        # KNN consumes the raw fingerprint block; the pipeline is identity
        pipeline = fit_pipeline(features, PipelineConfig(
            variance_threshold=None, correlation_threshold=None,
            quantize=False, normalize=False))
        model = knn_from_layout_matrix(features, truth,
                                       k=int(_pick(args, config, "k", 5)),
                                       pipeline_ref=pipeline.content_hash())
    else:
        pipeline = fit_pipeline(features, _pipeline_config(args, config))
        reduced = pipeline.apply_matrix(features)
        if args.model == "linear":
            model = train_linear(reduced, truth, hyper,
                                 pipeline_ref=pipeline.content_hash())
        else:
            hidden = _pick(args, config, "hidden", [128, 128])
            if isinstance(hidden, str):
                hidden = [int(x) for x in hidden.split(",") if x]
            model = train_snn(reduced, truth, hidden=hidden, hyper=hyper,
                              alpha_dropout_rate=float(_pick(args, config, "alpha_dropout", 0.0)),
                              pipeline_ref=pipeline.content_hash())

    save_artifact(args.out, model, pipeline,
                  name=_pick(args, config, "name", f"toxbench-{args.model}"),
                  version=_pick(args, config, "model_version", __version__),
                  hyperparameters=hyper.to_dict(), seed=seed)
    final_loss = getattr(model, "final_loss", None)
    _emit(args, {"artifact": str(args.out), "model": args.model, "seed": seed,
                 "final_loss": final_loss, "pipeline_width": pipeline.output_width},
          f"trained {args.model} (seed {seed}) -> {args.out}")
    return 0


def cmd_serve(args, config) -> int:
    server = ModelServer(ServerConfig(
        artifact_path=args.artifact,
        host=_pick(args, config, "host", "127.0.0.1"),
        port=int(_pick(args, config, "port", 8000)),
        fallback_probability=float(_pick(args, config, "fallback_probability", 0.5)),
        max_batch=int(_pick(args, config, "max_batch", 4096)),
        log_path=_pick(args, config, "log_path", None),
    ))
    print(f"serving on {server.base_url}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def cmd_eval(args, config) -> int:
    truth, report = load_dataset(args.data)
    if report.rows_excluded:
        log.warning("%d rows excluded at load", report.rows_excluded)
    job = EvaluationJob(
        submission_id=_pick(args, config, "submission_id", "cli"),
        endpoint_url=args.url,
        dataset_ref=DatasetRef.of(args.data),
        batch_size=int(_pick(args, config, "batch_size", 64)),
        retry=RetryPolicy(),
        timeout_s=float(_pick(args, config, "timeout", 30.0)),
    )
    result = run_evaluation(job, truth)
    doc = result.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", "utf-8")
    if result.status == "scored":
        human = (f"status scored  mean AUC {format_auc(result.run_score.mean_auc)}  "
                 f"({result.request_count} requests, {result.wall_clock_s:.1f}s)")
    else:
        human = f"status {result.status}: {result.error or result.validation.summary()}"
    _emit(args, doc, human)
    return 0 if result.status == "scored" else 1


def cmd_audit(args, config) -> int:
    matrix, report = load_dataset(args.data)
    result = audit(matrix)
    doc = result.to_dict()
    doc["rows_excluded_at_load"] = report.rows_excluded
    _emit(args, doc, result.render_table()
          + (f"\n({report.rows_excluded} rows excluded at load)" if report.rows_excluded else ""))
    return 0


def cmd_submit(args, config) -> int:
    card = json.loads(Path(args.card).read_text("utf-8"))
    doc = _http("POST", args.registry.rstrip("/") + "/submissions", card)
    _emit(args, doc, f"submission {doc['id']} created (status {doc['status']})")
    return 0


def cmd_review(args, config) -> int:
    import os
    token = _pick(args, config, "token", None) or os.environ.get(ADMIN_TOKEN_ENV, "")
    if not token:
        raise CliError(f"admin token required (flag --token or ${ADMIN_TOKEN_ENV})")
    doc = _http("POST", f"{args.registry.rstrip('/')}/submissions/{args.id}/review",
                {"decision": args.decision, "reviewer": args.reviewer, "note": args.note},
                token=token)
    _emit(args, doc, f"submission {doc['id']} -> {doc['status']}")
    return 0


def cmd_leaderboard(args, config) -> int:
    url = (f"{args.registry.rstrip('/')}/leaderboard?sort={args.sort}&dir={args.dir}"
           + (f"&q={args.q}" if args.q else "")
           + (f"&status={args.status}" if args.status else ""))
    import os
    token = os.environ.get(ADMIN_TOKEN_ENV, "")
    doc = _http("GET", url, token=token or None)
    rows = doc["rows"]
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0
    if not rows:
        print("(leaderboard empty)")
        return 0
    name_w = max(len(r["model_name"]) for r in rows)
    dev_w = max(len(r["developer"]) for r in rows)
    for rank, row in enumerate(rows, 1):
        mean = format_auc(row["mean_auc"]) if row["mean_auc"] is not None else "  -  "
        print(f"{rank:>3}  {row['model_name']:<{name_w}}  {row['developer']:<{dev_w}}  "
              f"{mean}  {row['status']}")
    return 0


def cmd_registry_serve(args, config) -> int:
    store = RegistryStore(args.store)
    server = RegistryServer(
        store,
        host=_pick(args, config, "host", "127.0.0.1"),
        port=int(_pick(args, config, "port", 8100)),
        admin_token=_pick(args, config, "token", None),
        ui_dir=_pick(args, config, "ui_dir", None),
    )
    print(f"registry listening on {server.base_url}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toxbench",
        description="Bioactivity benchmark platform: featurize, train, serve, evaluate, curate.")
    parser.add_argument("--version", action="version", version=f"toxbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file (flags win)")
        p.add_argument("--seed", type=int, default=None, help="random seed")
        p.add_argument("--log-level", default="warning",
                       choices=["debug", "info", "warning", "error"])
        p.add_argument("--json", action="store_true",
                       help="emit one JSON document on stdout")

    p = sub.add_parser("featurize", help="write the feature matrix for a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(fn=cmd_featurize)

    p = sub.add_parser("train", help="train a baseline model into an artifact directory")
    p.add_argument("--model", required=True, choices=["linear", "snn", "knn"])
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None, dest="learning_rate")
    p.add_argument("--l2", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None, dest="batch_size")
    p.add_argument("--momentum", type=float, default=None)
    p.add_argument("--hidden", default=None, help="comma-separated hidden widths (snn)")
    p.add_argument("--alpha-dropout", type=float, default=None, dest="alpha_dropout")
    p.add_argument("--k", type=int, default=None, help="neighbor count (knn)")
    p.add_argument("--variance-threshold", type=float, default=None, dest="variance_threshold")
    p.add_argument("--correlation-threshold", type=float, default=None,
                   dest="correlation_threshold")
    p.add_argument("--quantize", action="store_true", default=None)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--top-k-variance", type=int, default=None, dest="top_k_variance")
    common(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("serve", help="serve a trained artifact over HTTP /predict")
    p.add_argument("--artifact", required=True)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default=None)
    p.add_argument("--fallback-probability", type=float, default=None,
                   dest="fallback_probability")
    p.add_argument("--max-batch", type=int, default=None, dest="max_batch")
    p.add_argument("--log-path", default=None, dest="log_path")
    common(p)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("eval", help="evaluate a remote /predict endpoint against a dataset")
    p.add_argument("--url", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None, help="write the result JSON here")
    p.add_argument("--batch-size", type=int, default=None, dest="batch_size")
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--submission-id", default=None, dest="submission_id")
    common(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("audit", help="label availability / class balance report")
    p.add_argument("--data", required=True)
    common(p)
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("submit", help="submit a model card to a registry")
    p.add_argument("--card", required=True)
    p.add_argument("--registry", required=True)
    common(p)
    p.set_defaults(fn=cmd_submit)

    p = sub.add_parser("review", help="approve or reject a preliminary submission")
    p.add_argument("--id", required=True, type=int)
    p.add_argument("--decision", required=True, choices=["approve", "reject"])
    p.add_argument("--registry", required=True)
    p.add_argument("--reviewer", default="admin")
    p.add_argument("--note", default="")
    p.add_argument("--token", default=None)
    common(p)
    p.set_defaults(fn=cmd_review)

    p = sub.add_parser("leaderboard", help="query a registry leaderboard")
    p.add_argument("--registry", required=True)
    p.add_argument("--sort", default="mean_auc", choices=["mean_auc", "date", "name"])
    p.add_argument("--dir", default="desc", choices=["asc", "desc"])
    p.add_argument("--status", default=None)
    p.add_argument("--q", default=None)
    common(p)
    p.set_defaults(fn=cmd_leaderboard)

    p = sub.add_parser("registry-serve", help="run the registry HTTP service")
    p.add_argument("--store", required=True, help="event log path")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default=None)
    p.add_argument("--token", default=None)
    p.add_argument("--ui-dir", default=None, dest="ui_dir")
    common(p)
    p.set_defaults(fn=cmd_registry_serve)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper()))
    try:
        config = _read_config(args.config)
        return args.fn(args, config)
    except (CliError, DatasetError, ArtifactError, RegistryError,
            TrainingDiverged, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

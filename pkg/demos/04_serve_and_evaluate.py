"""Serve a trained artifact over HTTP and evaluate it like the leaderboard does.

Run: python demos/04_serve_and_evaluate.py
"""

import json
import tempfile
import urllib.request
from pathlib import Path

from toxbench.dataset import load_dataset, write_dataset
from toxbench.featurize import PipelineConfig, assemble_matrix, fit_pipeline
from toxbench.models import TrainConfig, save_artifact, train_linear
from toxbench.orchestrate import DatasetRef, EvaluationJob, run_evaluation
from toxbench.serve import ServerConfig, running_server
from toxbench.synthetic import molecule_pool, synthetic_matrix

pool = molecule_pool(260, seed=33)
train_mols, test_mols = pool[:200], pool[200:]
train = synthetic_matrix(train_mols, seed=34, flip_rate=0.05, mask_rate=0.2)
test = synthetic_matrix(test_mols, seed=35, mask_rate=0.1, id_prefix="tst")

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    features = assemble_matrix(train_mols)
    pipeline = fit_pipeline(features, PipelineConfig(variance_threshold=0.02,
                                                     correlation_threshold=0.98))
    model = train_linear(pipeline.apply_matrix(features), train,
                         TrainConfig(epochs=80, learning_rate=0.2, seed=1),
                         pipeline_ref=pipeline.content_hash())
    artifact = tmp / "artifact"
    save_artifact(artifact, model, pipeline, name="demo-linear", version="1.0.0")

    test_csv = tmp / "holdout.csv"
    write_dataset(test, test_csv)
    holdout, _ = load_dataset(test_csv)

    with running_server(ServerConfig(artifact_path=str(artifact))) as server:
        print(f"model serving on {server.base_url}")

        # talk to it directly, like any external client would
        body = json.dumps({"smiles": ["CCO", "c1ccccc1"]}).encode()
        request = urllib.request.Request(
            server.base_url + "/predict", data=body,
            headers={"Content-Type": "application/json"})
        with urllib.request.urlopen(request) as resp:
            doc = json.loads(resp.read())
        print("direct /predict for CCO:",
              {k: round(v, 3) for k, v in list(doc["predictions"]["CCO"].items())[:3]},
              "...")

        # now the full orchestrated evaluation: batch, validate, score
        job = EvaluationJob(submission_id="demo", endpoint_url=server.base_url,
                            dataset_ref=DatasetRef.of(test_csv), batch_size=16)
        result = run_evaluation(job, holdout)

    print(f"\nevaluation status: {result.status}")
    print(f"mean AUC: {result.run_score.mean_auc:.3f} "
          f"over {result.request_count} requests in {result.wall_clock_s:.1f}s")
    for score in result.run_score.per_endpoint[:4]:
        print(f"  {score.endpoint:<14} {score.auc:.3f} "
              f"({score.n_pos} pos / {score.n_neg} neg)")

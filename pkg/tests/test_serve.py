import json
import urllib.request

import numpy as np
import pytest

from toxbench.featurize import PipelineConfig, assemble_matrix, fit_pipeline
from toxbench.models import (
    ArtifactError,
    TrainConfig,
    load_artifact,
    save_artifact,
    train_linear,
)
from toxbench.protocol import PredictRequest, decode_response, validate_response
from toxbench.serve import Predictor, ServerConfig, handle_predict, running_server
from toxbench.synthetic import molecule_pool, synthetic_matrix


@pytest.fixture(scope="module")
def artifact_dir(tmp_path_factory):
    mols = molecule_pool(60, seed=3)
    truth = synthetic_matrix(mols, seed=4, mask_rate=0.15)
    features = assemble_matrix(mols)
    pipeline = fit_pipeline(features, PipelineConfig())
    model = train_linear(pipeline.apply_matrix(features), truth,
                         TrainConfig(epochs=25, seed=1),
                         pipeline_ref=pipeline.content_hash())
    directory = tmp_path_factory.mktemp("artifact")
    save_artifact(directory, model, pipeline, name="serve-test-model",
                  version="0.0.1", seed=1)
    return directory


class TestArtifact:
    def test_round_trip_predicts_identically(self, artifact_dir):
        loaded = load_artifact(artifact_dir)
        mols = molecule_pool(5, seed=9)
        for mol in mols:
            vector = loaded.pipeline.apply(
                assemble_matrix([mol])[0])
            probs = loaded.model.predict_row(vector)
            assert probs.shape == (12,)
            assert np.all((probs >= 0) & (probs <= 1))
        again = load_artifact(artifact_dir)
        row = loaded.pipeline.apply(assemble_matrix([mols[0]])[0])
        assert np.array_equal(loaded.model.predict_row(row),
                              again.model.predict_row(row))

    def test_manifest_hash_tamper_refused(self, artifact_dir, tmp_path):
        import shutil
        copy = tmp_path / "tampered"
        shutil.copytree(artifact_dir, copy)
        manifest = json.loads((copy / "manifest.json").read_text())
        manifest["pipeline_hash"] = "0" * 64
        (copy / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(ArtifactError) as err:
            load_artifact(copy)
        assert "pipeline" in str(err.value)

    def test_truncated_weights_refused(self, artifact_dir, tmp_path):
        import shutil
        copy = tmp_path / "truncated"
        shutil.copytree(artifact_dir, copy)
        blob = (copy / "weights.bin").read_bytes()
        (copy / "weights.bin").write_bytes(blob[:len(blob) - 16])
        manifest = json.loads((copy / "manifest.json").read_text())
        from toxbench.hashing import sha256_bytes
        manifest["weights_hash"] = sha256_bytes(blob[:len(blob) - 16])
        (copy / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(ArtifactError) as err:
            load_artifact(copy)
        assert "size" in str(err.value) or "bytes" in str(err.value)

    def test_missing_file_refused(self, artifact_dir, tmp_path):
        import shutil
        copy = tmp_path / "incomplete"
        shutil.copytree(artifact_dir, copy)
        (copy / "pipeline.bin").unlink()
        with pytest.raises(ArtifactError) as err:
            load_artifact(copy)
        assert "pipeline.bin" in str(err.value)


class TestHandlePredict:
    def test_example_request_full_coverage(self, artifact_dir):
        loaded = load_artifact(artifact_dir)
        request = PredictRequest(("CCO", "c1ccccc1"))
        response = handle_predict(loaded, request)
        assert set(response.predictions) == {"CCO", "c1ccccc1"}
        for per_target in response.predictions.values():
            assert len(per_target) == 12
        assert validate_response(request, response).ok

    def test_fallback_for_unparseable(self, artifact_dir):
        loaded = load_artifact(artifact_dir)
        request = PredictRequest(("CCO", "not_a_smiles"))
        response = handle_predict(loaded, request, fallback_probability=0.5)
        assert all(v == 0.5 for v in response.predictions["not_a_smiles"].values())
        assert validate_response(request, response).ok

    def test_batch_size_independence(self, artifact_dir):
        loaded = load_artifact(artifact_dir)
        mols = [m.source for m in molecule_pool(20, seed=21)]
        alone = {}
        for smiles in mols:
            response = handle_predict(loaded, PredictRequest((smiles,)))
            alone[smiles] = response.predictions[smiles]
        together = handle_predict(loaded, PredictRequest(tuple(mols)))
        assert together.predictions == alone

    def test_deterministic(self, artifact_dir):
        loaded = load_artifact(artifact_dir)
        predictor = Predictor(loaded)
        request = PredictRequest(("CCO", "CCN", "c1ccccc1"))
        first, _ = predictor.handle(request)
        second, _ = predictor.handle(request)
        assert first == second


def _post(url, body: bytes):
    request = urllib.request.Request(
        url, data=body, headers={"Content-Type": "application/json"}, method="POST")
    try:
        with urllib.request.urlopen(request, timeout=10) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()


class TestHttpServer:
    def test_predict_and_operational_endpoints(self, artifact_dir):
        config = ServerConfig(artifact_path=str(artifact_dir), max_batch=8)
        with running_server(config) as server:
            url = server.base_url
            status, payload = _post(url + "/predict",
                                    b'{"smiles": ["CCO", "c1ccccc1"]}')
            assert status == 200
            response = decode_response(payload)
            assert set(response.predictions) == {"CCO", "c1ccccc1"}
            assert response.model_info["name"] == "serve-test-model"

            # byte-identical on repeat
            status2, payload2 = _post(url + "/predict",
                                      b'{"smiles": ["CCO", "c1ccccc1"]}')
            assert payload2 == payload

            with urllib.request.urlopen(url + "/healthz", timeout=10) as resp:
                health = json.loads(resp.read())
            assert health["name"] == "serve-test-model"

            status, payload = _post(url + "/predict", b'{"smiles": []}')
            assert status == 422
            assert json.loads(payload)["error"]["path"] == "$.smiles"

            status, payload = _post(url + "/predict", b'not json at all')
            assert status == 422
            assert "error" in json.loads(payload)

            big = json.dumps({"smiles": [f"{'C' * (i + 1)}" for i in range(9)]}).encode()
            status, payload = _post(url + "/predict", big)
            assert status == 422
            assert "max_batch" in json.loads(payload)["error"]["message"]

            status, _ = _post(url + "/nope", b"{}")
            assert status == 404

            with urllib.request.urlopen(url + "/metricsz", timeout=10) as resp:
                metrics = json.loads(resp.read())
            assert metrics["requests"] == 2
            assert metrics["fallbacks"] == 0

    def test_fallbacks_counted(self, artifact_dir):
        config = ServerConfig(artifact_path=str(artifact_dir))
        with running_server(config) as server:
            status, payload = _post(server.base_url + "/predict",
                                    b'{"smiles": ["???bogus"]}')
            assert status == 200
            with urllib.request.urlopen(server.base_url + "/metricsz", timeout=10) as resp:
                metrics = json.loads(resp.read())
            assert metrics["fallbacks"] == 1

    def test_concurrent_identical_requests(self, artifact_dir):
        import concurrent.futures

        config = ServerConfig(artifact_path=str(artifact_dir))
        body = b'{"smiles": ["CCO", "CCN", "c1ccccc1"]}'
        with running_server(config) as server:
            with concurrent.futures.ThreadPoolExecutor(8) as pool:
                payloads = list(pool.map(
                    lambda _: _post(server.base_url + "/predict", body)[1], range(16)))
        assert len(set(payloads)) == 1

import numpy as np
import pytest

from toxbench.dataset import ENDPOINTS, load_dataset, write_dataset
from toxbench.featurize import PipelineConfig, assemble_matrix, fit_pipeline
from toxbench.metrics import score_run
from toxbench.models import TrainConfig, save_artifact, train_linear
from toxbench.orchestrate import (
    DatasetRef,
    EvaluationJob,
    RerunAborted,
    RetryPolicy,
    dedupe_preserving_order,
    plan_batches,
    rerun_protocol,
    run_evaluation,
)
from toxbench.protocol import decode_request, encode_response
from toxbench.serve import Predictor, PredictRequest, ServerConfig, running_server
from toxbench.serve import load_artifact
from toxbench.synthetic import molecule_pool, synthetic_matrix


class TestPlanBatches:
    def test_647_at_64(self):
        batches = plan_batches([f"s{i}" for i in range(647)], 64)
        assert len(batches) == 11
        assert [len(b) for b in batches[:-1]] == [64] * 10
        assert len(batches[-1]) == 7

    def test_645_at_64(self):
        batches = plan_batches([f"s{i}" for i in range(645)], 64)
        assert len(batches) == 11
        assert len(batches[-1]) == 5

    def test_single_batch(self):
        assert plan_batches(["a", "b"], 10) == [["a", "b"]]

    def test_covers_exactly_once(self):
        items = [f"s{i}" for i in range(100)]
        batches = plan_batches(items, 7)
        flattened = [s for b in batches for s in b]
        assert flattened == items

    def test_dedupe(self):
        assert dedupe_preserving_order(["a", "b", "a", "c", "b"]) == ["a", "b", "c"]


@pytest.fixture(scope="module")
def served_setup(tmp_path_factory):
    """Trained artifact + test dataset file, shared across orchestrator tests."""
    base = tmp_path_factory.mktemp("orch")
    pool = molecule_pool(140, seed=31)
    train_mols, test_mols = pool[:100], pool[100:]
    train = synthetic_matrix(train_mols, seed=1, flip_rate=0.05, mask_rate=0.2)
    test = synthetic_matrix(test_mols, seed=2, mask_rate=0.1, id_prefix="tst")

    features = assemble_matrix(train_mols)
    pipeline = fit_pipeline(features, PipelineConfig())
    model = train_linear(pipeline.apply_matrix(features), train,
                         TrainConfig(epochs=40, seed=5),
                         pipeline_ref=pipeline.content_hash())
    artifact = base / "artifact"
    save_artifact(artifact, model, pipeline, name="orch-model", seed=5)

    test_csv = base / "test.csv"
    write_dataset(test, test_csv)
    return artifact, test_csv


class FakeClient:
    """In-process client driving a Predictor, with optional response tampering."""

    def __init__(self, artifact, tamper=None, fail_first=0):
        self.predictor = Predictor(load_artifact(artifact))
        self.tamper = tamper
        self.fail_remaining = fail_first
        self.calls = 0

    def post(self, url, body, timeout_s):
        self.calls += 1
        if self.fail_remaining > 0:
            self.fail_remaining -= 1
            raise ConnectionError("synthetic transport failure")
        request = decode_request(body)
        response, _ = self.predictor.handle(request)
        if self.tamper:
            response = self.tamper(response)
        return 200, encode_response(response)


class TestRunEvaluation:
    def test_scored_matches_offline(self, served_setup):
        artifact, test_csv = served_setup
        test, _ = load_dataset(test_csv)
        job = EvaluationJob(submission_id="t1", endpoint_url="http://fake",
                            dataset_ref=DatasetRef.of(test_csv), batch_size=16)
        client = FakeClient(artifact)
        result = run_evaluation(job, test, client, sleep=lambda s: None)
        assert result.status == "scored"

        # offline: the same predictions through score_run directly
        predictor = Predictor(load_artifact(artifact))
        response, _ = predictor.handle(PredictRequest(tuple(
            dedupe_preserving_order(test.smiles))))
        predictions = np.array([
            [response.predictions[s][e] for e in ENDPOINTS] for s in test.smiles])
        offline = score_run(predictions, test)
        assert result.run_score.mean_auc == offline.mean_auc
        assert result.run_score.auc_map() == offline.auc_map()

    def test_partition_independence(self, served_setup):
        artifact, test_csv = served_setup
        test, _ = load_dataset(test_csv)
        outcomes = []
        for batch_size in (1, 64):
            job = EvaluationJob(submission_id=f"b{batch_size}",
                                endpoint_url="http://fake",
                                dataset_ref=DatasetRef.of(test_csv),
                                batch_size=batch_size)
            result = run_evaluation(job, test, FakeClient(artifact),
                                    sleep=lambda s: None)
            assert result.status == "scored"
            outcomes.append(result.run_score.auc_map())
        assert outcomes[0] == outcomes[1]

    def test_missing_pair_rejected(self, served_setup):
        artifact, test_csv = served_setup
        test, _ = load_dataset(test_csv)

        target = test.smiles[0]

        def drop_one(response):
            response.predictions[target].pop("SR-p53")
            return response

        job = EvaluationJob(submission_id="t2", endpoint_url="http://fake",
                            dataset_ref=DatasetRef.of(test_csv), batch_size=500)
        result = run_evaluation(job, test, FakeClient(artifact, tamper=drop_one),
                                sleep=lambda s: None)
        assert result.status == "rejected"
        kinds = result.validation.kinds()
        assert kinds == ["missing_target"]
        assert result.validation.violations[0].smiles == target

    def test_nan_rejected(self, served_setup):
        artifact, test_csv = served_setup
        test, _ = load_dataset(test_csv)

        def poison(response):
            first = next(iter(response.predictions))
            response.predictions[first]["NR-AR"] = float("nan")
            return response

        job = EvaluationJob(submission_id="t3", endpoint_url="http://fake",
                            dataset_ref=DatasetRef.of(test_csv), batch_size=500)
        result = run_evaluation(job, test, FakeClient(artifact, tamper=poison),
                                sleep=lambda s: None)
        assert result.status == "rejected"
        assert "non_finite" in result.validation.kinds()

    def test_unreachable_fails_with_backoff_schedule(self, served_setup):
        _, test_csv = served_setup
        test, _ = load_dataset(test_csv)

        class DeadClient:
            calls = 0

            def post(self, url, body, timeout_s):
                DeadClient.calls += 1
                raise ConnectionError("nothing listening")

        delays = []
        job = EvaluationJob(submission_id="t4", endpoint_url="http://fake",
                            dataset_ref=DatasetRef.of(test_csv), batch_size=5000,
                            retry=RetryPolicy(max_attempts=3, backoff_base=1.0,
                                              backoff_factor=2.0))
        result = run_evaluation(job, test, DeadClient(), sleep=delays.append)
        assert result.status == "failed"
        assert DeadClient.calls == 3
        assert delays == [1.0, 2.0]
        assert [d for _, d in result.backoff_log] == [1.0, 2.0]
        assert "attempts exhausted" in result.error

    def test_retry_then_success(self, served_setup):
        artifact, test_csv = served_setup
        test, _ = load_dataset(test_csv)
        client = FakeClient(artifact, fail_first=2)
        job = EvaluationJob(submission_id="t5", endpoint_url="http://fake",
                            dataset_ref=DatasetRef.of(test_csv), batch_size=5000,
                            max_in_flight=1)
        result = run_evaluation(job, test, client, sleep=lambda s: None)
        assert result.status == "scored"
        assert client.calls == 3

    def test_dataset_hash_integrity(self, served_setup, tmp_path):
        artifact, test_csv = served_setup
        test, _ = load_dataset(test_csv)
        ref = DatasetRef.of(test_csv)
        tampered_ref = DatasetRef(path=str(test_csv), content_hash="0" * 64)
        job = EvaluationJob(submission_id="t6", endpoint_url="http://fake",
                            dataset_ref=tampered_ref)
        result = run_evaluation(job, test, FakeClient(artifact), sleep=lambda s: None)
        assert result.status == "failed"
        assert "dataset changed" in result.error
        assert ref.content_hash != tampered_ref.content_hash

    def test_against_live_server(self, served_setup):
        artifact, test_csv = served_setup
        test, _ = load_dataset(test_csv)
        with running_server(ServerConfig(artifact_path=str(artifact))) as server:
            job = EvaluationJob(submission_id="live", endpoint_url=server.base_url,
                                dataset_ref=DatasetRef.of(test_csv), batch_size=16)
            result = run_evaluation(job, test)
        assert result.status == "scored"
        assert result.model_info["name"] == "orch-model"
        assert result.request_count == 3  # 40 unique molecules / 16


class TestRerunProtocol:
    def test_aggregates_means(self, served_setup):
        artifact, test_csv = served_setup
        test, _ = load_dataset(test_csv)
        jobs = [EvaluationJob(submission_id=f"r{i}", endpoint_url="http://fake",
                              dataset_ref=DatasetRef.of(test_csv), batch_size=100)
                for i in range(3)]
        client = FakeClient(artifact)
        aggregate, results = rerun_protocol(jobs, test, client, sleep=lambda s: None)
        assert len(results) == 3
        # same artifact every run: identical means, MAD 0
        assert aggregate.mad == 0.0
        assert aggregate.median == results[0].run_score.mean_auc

    def test_rejected_run_aborts(self, served_setup):
        artifact, test_csv = served_setup
        test, _ = load_dataset(test_csv)

        class FlakyTamper:
            count = 0

            def __call__(self, response):
                FlakyTamper.count += 1
                if FlakyTamper.count == 2:  # only the second run is tampered
                    first = next(iter(response.predictions))
                    response.predictions[first].pop("NR-AR")
                return response

        jobs = [EvaluationJob(submission_id=f"r{i}", endpoint_url="http://fake",
                              dataset_ref=DatasetRef.of(test_csv), batch_size=5000)
                for i in range(3)]
        client = FakeClient(artifact, tamper=FlakyTamper())
        with pytest.raises(RerunAborted) as err:
            rerun_protocol(jobs, test, client, sleep=lambda s: None)
        assert err.value.statuses == ["scored", "rejected", "scored"]

    def test_empty_jobs(self):
        with pytest.raises(ValueError):
            rerun_protocol([], None)


class TestJobValidation:
    def test_bad_url(self, tmp_path):
        csv = tmp_path / "d.csv"
        csv.write_text("x")
        with pytest.raises(ValueError):
            EvaluationJob(submission_id="x", endpoint_url="ftp://nope",
                          dataset_ref=DatasetRef.of(csv))

    def test_bad_batch(self, tmp_path):
        csv = tmp_path / "d.csv"
        csv.write_text("x")
        with pytest.raises(ValueError):
            EvaluationJob(submission_id="x", endpoint_url="http://ok",
                          dataset_ref=DatasetRef.of(csv), batch_size=0)

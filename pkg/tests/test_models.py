import random

import numpy as np
import pytest

from toxbench.dataset import ENDPOINTS, LabelMatrix
from toxbench.metrics import roc_auc
from toxbench.models import (
    SELU_ALPHA,
    SELU_LAMBDA,
    LlmPredictor,
    PromptSpec,
    ReplyParseError,
    RolloutConfig,
    ScriptedClient,
    TrainConfig,
    aggregate_rollouts,
    alpha_dropout,
    build_knn,
    build_prompt,
    hidden_activations,
    init_snn,
    masked_bce,
    parse_reply,
    selu,
    sigmoid,
    snn_forward,
    snn_gradients,
    tanimoto,
    train_linear,
    train_snn,
)


def rel_error(a, b):
    denominator = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return np.linalg.norm(a - b) / denominator


def random_slice(rng, rows=3):
    logits = rng.standard_normal((rows, 12))
    labels = (rng.random((rows, 12)) > 0.5).astype(float)
    mask = rng.random((rows, 12)) > 0.4
    labels = np.where(mask, labels, np.nan)
    return logits, labels, mask


class TestMaskedBce:
    def test_all_masked(self):
        logits = np.ones((2, 12))
        loss, grad = masked_bce(logits, np.full((2, 12), np.nan), np.zeros((2, 12), bool))
        assert loss == 0.0
        assert np.all(grad == 0.0)

    def test_single_cell_ln2(self):
        logits = np.zeros((1, 12))
        labels = np.full((1, 12), np.nan)
        mask = np.zeros((1, 12), bool)
        labels[0, 3] = 1.0
        mask[0, 3] = True
        loss, grad = masked_bce(logits, labels, mask)
        assert loss == pytest.approx(np.log(2), abs=1e-15)
        assert grad[0, 3] == -0.5

    def test_gradient_zero_at_masked(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            logits, labels, mask = random_slice(rng)
            _, grad = masked_bce(logits, labels, mask)
            assert np.all(grad[~mask] == 0.0)

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(1)
        step = 1e-5
        for _ in range(20):
            logits, labels, mask = random_slice(rng)
            if not mask.any():
                continue
            _, grad = masked_bce(logits, labels, mask)
            numeric = np.zeros_like(logits)
            for i in range(logits.shape[0]):
                for j in range(logits.shape[1]):
                    up = logits.copy()
                    up[i, j] += step
                    down = logits.copy()
                    down[i, j] -= step
                    numeric[i, j] = (masked_bce(up, labels, mask)[0]
                                     - masked_bce(down, labels, mask)[0]) / (2 * step)
            assert rel_error(grad, numeric) <= 1e-6

    def test_extreme_logits_stable(self):
        logits = np.array([[500.0, -500.0] + [0.0] * 10])
        labels = np.array([[1.0, 0.0] + [0.5] * 10])
        mask = np.array([[True, True] + [False] * 10])
        loss, grad = masked_bce(logits, labels, mask)
        assert np.isfinite(loss) and loss < 1e-100
        assert np.all(np.isfinite(grad))


def separable_truth(rng, n, d):
    """Single-endpoint labels from a random hyperplane; others masked."""
    X = rng.standard_normal((n, d))
    w = rng.standard_normal(d)
    y = (X @ w > 0).astype(int)
    cells = [[int(y[i])] + [None] * 11 for i in range(n)]
    ids = [f"r{i}" for i in range(n)]
    smiles = ["C"] * n
    return X, LabelMatrix.build(ids, smiles, cells)


class TestTrainLinear:
    def test_separable_reaches_high_auc(self):
        rng = np.random.default_rng(0)
        X, truth = separable_truth(rng, 300, 20)
        model = train_linear(X, truth, TrainConfig(epochs=200, learning_rate=0.5,
                                                   l2=0.0, seed=3))
        scores = model.predict_proba(X)[:, 0]
        labels, mask = truth.labels_and_mask()
        assert roc_auc(scores, labels[:, 0], mask[:, 0]) >= 0.99

    def test_heavy_l2_shrinks_to_half(self):
        rng = np.random.default_rng(1)
        X, truth = separable_truth(rng, 100, 10)
        # keep the l2 step contractive: learning_rate * l2 < 1
        model = train_linear(X, truth, TrainConfig(epochs=100, learning_rate=0.05,
                                                   l2=10.0, seed=0, momentum=0.0))
        assert np.abs(model.weights).max() < 0.05
        assert np.allclose(model.predict_proba(X[:5]), 0.5, atol=0.1)

    def test_seeded_determinism(self):
        rng = np.random.default_rng(2)
        X, truth = separable_truth(rng, 60, 8)
        a = train_linear(X, truth, TrainConfig(seed=7, epochs=30))
        b = train_linear(X, truth, TrainConfig(seed=7, epochs=30))
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.bias, b.bias)
        c = train_linear(X, truth, TrainConfig(seed=8, epochs=30))
        assert not np.array_equal(a.weights, c.weights)

    def test_divergence_detected(self):
        from toxbench.models import TrainingDiverged
        rng = np.random.default_rng(3)
        X, truth = separable_truth(rng, 50, 5)
        with pytest.raises((TrainingDiverged, FloatingPointError)):
            train_linear(X * 1e6, truth,
                         TrainConfig(epochs=200, learning_rate=1e12, momentum=0.99))


class TestSelu:
    def test_pinned_values(self):
        assert float(selu(0.0)) == 0.0
        assert float(selu(1.0)) == SELU_LAMBDA
        assert float(selu(-50.0)) == pytest.approx(-SELU_LAMBDA * SELU_ALPHA, abs=1e-9)

    def test_constants(self):
        assert SELU_LAMBDA == pytest.approx(1.0507009873554805, abs=0)
        assert SELU_ALPHA == pytest.approx(1.6732632423543772, abs=0)

    def test_alpha_dropout_identity_at_zero(self):
        x = np.random.default_rng(0).standard_normal(100)
        assert np.array_equal(alpha_dropout(x, 0.0, seed=1), x)

    def test_alpha_dropout_deterministic(self):
        x = np.random.default_rng(1).standard_normal(500)
        a = alpha_dropout(x, 0.3, seed=9)
        b = alpha_dropout(x, 0.3, seed=9)
        assert np.array_equal(a, b)
        c = alpha_dropout(x, 0.3, seed=10)
        assert not np.array_equal(a, c)

    def test_alpha_dropout_preserves_moments(self):
        x = np.random.default_rng(2).standard_normal(200_000)
        out = alpha_dropout(x, 0.25, seed=4)
        assert abs(out.mean()) < 0.02
        assert abs(out.var() - 1.0) < 0.05


class TestSnn:
    def test_self_normalization_at_init(self):
        rng = np.random.default_rng(42)
        X = rng.standard_normal((1024, 128))
        model = init_snn(128, [128] * 5, seed=7)
        for layer in hidden_activations(model, X):
            assert -0.1 <= layer.mean() <= 0.1
            assert 0.8 <= layer.var() <= 1.25

    def test_forward_deterministic(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((10, 16))
        model = init_snn(16, [8, 8], seed=3)
        assert np.array_equal(snn_forward(model, X), snn_forward(model, X))

    def test_forward_in_unit_interval(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((10, 16))
        model = init_snn(16, [8], seed=3)
        probs = snn_forward(model, X)
        assert probs.shape == (10, 12)
        assert np.all((probs > 0) & (probs < 1))

    def test_full_network_gradient_check(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((3, 10))
        labels = (rng.random((3, 12)) > 0.5).astype(float)
        mask = rng.random((3, 12)) > 0.3
        labels = np.where(mask, labels, np.nan)
        model = init_snn(10, [7, 6], seed=2)
        step = 1e-5

        _, grads_W, grads_b = snn_gradients(model, X, labels, mask, l2=0.01)
        for layer in range(len(model.weights)):
            for params, grads in ((model.weights, grads_W), (model.biases, grads_b)):
                numeric = np.zeros_like(params[layer])
                flat = params[layer].reshape(-1)
                numeric_flat = numeric.reshape(-1)
                for idx in range(flat.size):
                    original = flat[idx]
                    flat[idx] = original + step
                    up, _, _ = snn_gradients(model, X, labels, mask, l2=0.01)
                    flat[idx] = original - step
                    down, _, _ = snn_gradients(model, X, labels, mask, l2=0.01)
                    flat[idx] = original
                    numeric_flat[idx] = (up - down) / (2 * step)
                assert rel_error(grads[layer], numeric) <= 1e-4

    def test_training_improves_separable(self):
        rng = np.random.default_rng(8)
        X, truth = separable_truth(rng, 200, 16)
        model = train_snn(X, truth, hidden=[32], hyper=TrainConfig(
            epochs=120, learning_rate=0.05, l2=0.0, seed=1))
        scores = model.predict_proba(X)[:, 0]
        labels, mask = truth.labels_and_mask()
        assert roc_auc(scores, labels[:, 0], mask[:, 0]) >= 0.97

    def test_seeded_determinism(self):
        rng = np.random.default_rng(9)
        X, truth = separable_truth(rng, 50, 8)
        a = train_snn(X, truth, hidden=[8], hyper=TrainConfig(seed=5, epochs=10),
                      alpha_dropout_rate=0.1)
        b = train_snn(X, truth, hidden=[8], hyper=TrainConfig(seed=5, epochs=10),
                      alpha_dropout_rate=0.1)
        for Wa, Wb in zip(a.weights, b.weights):
            assert np.array_equal(Wa, Wb)


class TestKnn:
    def make_store(self, fingerprints, cells):
        ids = [f"s{i}" for i in range(len(fingerprints))]
        truth = LabelMatrix.build(ids, ["C"] * len(fingerprints), cells)
        return build_knn(np.asarray(fingerprints, dtype=float), truth,
                         k=len(fingerprints))

    def test_tanimoto_values(self):
        assert tanimoto([2, 1, 0], [1, 1, 1]) == 0.5
        assert tanimoto([1, 2, 3], [1, 2, 3]) == 1.0
        assert tanimoto([1, 0], [0, 1]) == 0.0
        assert tanimoto([0, 0], [0, 0]) == 1.0
        with pytest.raises(ValueError):
            tanimoto([1], [1, 2])

    def test_uniform_similarity_returns_prior(self):
        # identical fingerprints -> all similarities 1 -> labeled active rate
        cells = [[1] + [None] * 11, [1] + [None] * 11, [0] + [None] * 11,
                 [None] * 12]
        model = self.make_store([[1, 1]] * 4, cells)
        out = model.predict_row(np.array([1.0, 1.0]))
        assert out[0] == pytest.approx(2 / 3)
        assert out[1] == 0.5  # endpoint with no labels anywhere

    def test_weighting(self):
        cells = [[1] + [None] * 11, [0] + [None] * 11]
        model = self.make_store([[4, 0], [0, 4]], cells)
        out = model.predict_row(np.array([4.0, 0.0]))
        # similarity 1 to the active row, 0 to the inactive one
        assert out[0] == 1.0

    def test_widening_beyond_k(self):
        cells = [[None] * 12, [None] * 12, [1] + [None] * 11]
        fingerprints = [[4, 0, 0], [3, 1, 0], [0, 0, 9]]
        truth = LabelMatrix.build(["a", "b", "c"], ["C"] * 3, cells)
        model = build_knn(np.asarray(fingerprints, float), truth, k=2)
        out = model.predict_row(np.array([4.0, 0.0, 0.0]))
        # the two nearest are unlabeled; widen to the labeled third row
        assert out[0] == 1.0

    def test_k_bounds(self):
        cells = [[1] + [None] * 11]
        truth = LabelMatrix.build(["a"], ["C"], cells)
        with pytest.raises(ValueError):
            build_knn(np.ones((1, 4)), truth, k=2)


class TestPromptAdapter:
    def test_prompt_bytes(self):
        system_text, user_text = build_prompt(PromptSpec(), "NR-AR", "CCO")
        assert "probability scores between 0.000 and 1.000" in system_text
        assert user_text == (
            "Analyze whether this molecule is likely to be toxic in the NR-AR assay.\n\n"
            "Target: Androgen Receptor - involved in male hormone signaling\n"
            "SMILES: CCO\n\n"
            "Provide only a probability between 0.000 and 1.000 indicating the "
            "likelihood of toxicity. Respond with only the number."
        )

    def test_all_endpoints_render(self):
        for endpoint in ENDPOINTS:
            _, user_text = build_prompt(PromptSpec(), endpoint, "c1ccccc1")
            assert f"the {endpoint} assay" in user_text

    def test_parse_reply(self):
        assert parse_reply("0.350") == 0.35
        assert parse_reply("  1  ") == 1.0
        assert parse_reply(".5") == 0.5
        for bad in ["toxic", "1.2", "-0.1", "0.3 maybe", "", "1e-3", "nan"]:
            with pytest.raises(ReplyParseError):
                parse_reply(bad)

    def test_aggregate(self):
        assert aggregate_rollouts([0.2, 0.4, 0.6, 0.8, 1.0]) == pytest.approx(0.6)
        with pytest.raises(ValueError):
            aggregate_rollouts([])
        with pytest.raises(ValueError):
            aggregate_rollouts([1.5])

    def test_predictor_aggregates_and_marks_failures(self):
        # one bad reply per 5 rollouts: mean over the 4 good ones
        client = ScriptedClient(["0.2", "0.4", "garbage", "0.6", "0.8"])
        predictor = LlmPredictor(client, rollout_cfg=RolloutConfig(rollouts=5))
        predictions, failures = predictor.predict_pairs(["CCO"])
        assert predictions["CCO"]["NR-AR"] == pytest.approx(0.5)
        assert len(failures) == 12  # one failed rollout per endpoint
        assert failures[0].endpoint == "NR-AR"

    def test_predictor_leaves_pair_unpredicted(self):
        client = ScriptedClient(["not a number"])
        predictor = LlmPredictor(client, rollout_cfg=RolloutConfig(rollouts=2))
        predictions, failures = predictor.predict_pairs(["CCO"])
        assert predictions["CCO"] == {}
        assert len(failures) == 24


class TestSigmoid:
    def test_extremes(self):
        out = sigmoid(np.array([-800.0, 0.0, 800.0]))
        assert out[0] == 0.0
        assert out[1] == 0.5
        assert out[2] == 1.0
        assert np.all(np.isfinite(out))

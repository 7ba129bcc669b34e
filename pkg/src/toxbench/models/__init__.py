"""Reference baselines: linear, self-normalizing network, Tanimoto KNN, LLM adapter."""

from .artifact import ArtifactError, LoadedModel, load_artifact, save_artifact
from .knn import KnnModel, build_knn, knn_from_layout_matrix, tanimoto, tanimoto_row
from .linear import LinearModel, TrainConfig, train_linear
from .llm import (
    DEFAULT_SYSTEM_TEXT,
    DEFAULT_USER_TEMPLATE,
    LlmPredictor,
    PromptSpec,
    ReplyParseError,
    RolloutConfig,
    RolloutFailure,
    ScriptedClient,
    TextCompletionClient,
    aggregate_rollouts,
    build_prompt,
    parse_reply,
)
from .losses import TrainingDiverged, masked_bce, sigmoid
from .snn import (
    SELU_ALPHA,
    SELU_LAMBDA,
    SnnModel,
    alpha_dropout,
    hidden_activations,
    init_snn,
    selu,
    selu_grad,
    snn_forward,
    snn_gradients,
    train_snn,
)

__all__ = [
    "ArtifactError",
    "DEFAULT_SYSTEM_TEXT",
    "DEFAULT_USER_TEMPLATE",
    "KnnModel",
    "LinearModel",
    "LlmPredictor",
    "LoadedModel",
    "PromptSpec",
    "ReplyParseError",
    "RolloutConfig",
    "RolloutFailure",
    "SELU_ALPHA",
    "SELU_LAMBDA",
    "ScriptedClient",
    "SnnModel",
    "TextCompletionClient",
    "TrainConfig",
    "TrainingDiverged",
    "aggregate_rollouts",
    "alpha_dropout",
    "build_knn",
    "build_prompt",
    "hidden_activations",
    "init_snn",
    "knn_from_layout_matrix",
    "load_artifact",
    "masked_bce",
    "parse_reply",
    "save_artifact",
    "selu",
    "selu_grad",
    "sigmoid",
    "snn_forward",
    "snn_gradients",
    "tanimoto",
    "tanimoto_row",
    "train_linear",
    "train_snn",
]

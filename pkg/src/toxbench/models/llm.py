"""Prompted language-model adapter: templates, reply parsing, rollouts.

No model runs here; an abstract text-completion client supplies replies.
A scripted client ships for tests and offline experiments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..dataset import ENDPOINT_DESCRIPTIONS, ENDPOINTS

DEFAULT_SYSTEM_TEXT = (
    "You are an expert in molecular toxicity prediction. "
    "Analyze molecules and provide probability scores between 0.000 and 1.000. "
    "Always respond with up to three decimal places."
)

DEFAULT_USER_TEMPLATE = (
    "Analyze whether this molecule is likely to be toxic in the {target} assay.\n"
    "\n"
    "Target: {description}\n"
    "SMILES: {smiles}\n"
    "\n"
    "Provide only a probability between 0.000 and 1.000 indicating the likelihood "
    "of toxicity. Respond with only the number."
)


@dataclass(frozen=True)
class PromptSpec:
    system_text: str = DEFAULT_SYSTEM_TEXT
    user_template: str = DEFAULT_USER_TEMPLATE
    target_descriptions: dict = field(default_factory=lambda: dict(ENDPOINT_DESCRIPTIONS))
    decimal_places: int = 3


@dataclass(frozen=True)
class RolloutConfig:
    rollouts: int = 5
    temperature: float = 0.7  # metadata, forwarded to the external client
    # aggregation is fixed to the arithmetic mean

    def __post_init__(self):
        if self.rollouts < 1:
            raise ValueError("rollouts must be >= 1")


class ReplyParseError(ValueError):
    pass


def build_prompt(spec: PromptSpec, endpoint: str, smiles: str) -> tuple[str, str]:
    """(system text, user text), byte-exact template rendering."""
    if endpoint not in ENDPOINTS:
        raise ValueError(f"unknown endpoint {endpoint!r}")
    if not smiles:
        raise ValueError("smiles must be non-empty")
    user = spec.user_template.format(
        target=endpoint,
        description=spec.target_descriptions[endpoint],
        smiles=smiles,
    )
    return spec.system_text, user


_DECIMAL = re.compile(r"^(?:\d+(?:\.\d+)?|\.\d+)$")


def parse_reply(text: str) -> float:
    """Extract a single decimal in [0, 1]; anything else is a failed rollout."""
    cleaned = text.strip()
    if not _DECIMAL.match(cleaned):
        raise ReplyParseError(f"reply is not a bare decimal: {text!r}")
    value = float(cleaned)
    if not 0.0 <= value <= 1.0:
        raise ReplyParseError(f"reply {value} outside [0, 1]")
    return value


def aggregate_rollouts(values, cfg: RolloutConfig = RolloutConfig()) -> float:
    """Arithmetic mean of successful rollout values."""
    values = [float(v) for v in values]
    if not values:
        raise ValueError("aggregation requires at least one successful rollout")
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"rollout value {v} outside [0, 1]")
    return sum(values) / len(values)


class TextCompletionClient:
    """Interface an external language-model client must provide."""

    def complete(self, system_text: str, user_text: str, temperature: float) -> str:
        raise NotImplementedError


class ScriptedClient(TextCompletionClient):
    """Deterministic stub replaying a fixed reply script (cycled)."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.calls: list[tuple[str, str]] = []
        if not self.replies:
            raise ValueError("need at least one scripted reply")

    def complete(self, system_text: str, user_text: str, temperature: float) -> str:
        self.calls.append((system_text, user_text))
        return self.replies[(len(self.calls) - 1) % len(self.replies)]


@dataclass(frozen=True)
class RolloutFailure:
    smiles: str
    endpoint: str
    rollout: int
    reason: str


class LlmPredictor:
    """Runs the prompt/rollout protocol against a text-completion client.

    Pairs with zero successful rollouts stay unpredicted; downstream
    validation rejects the incomplete response rather than papering over
    the failure.
    """

    kind = "llm"

    def __init__(self, client: TextCompletionClient,
                 prompt_spec: PromptSpec = PromptSpec(),
                 rollout_cfg: RolloutConfig = RolloutConfig()):
        self.client = client
        self.prompt_spec = prompt_spec
        self.rollout_cfg = rollout_cfg

    def predict_pairs(self, smiles_list) -> tuple[dict, list[RolloutFailure]]:
        """Nested {smiles: {endpoint: probability}}; incomplete pairs omitted."""
        predictions: dict[str, dict[str, float]] = {}
        failures: list[RolloutFailure] = []
        for smiles in smiles_list:
            predictions[smiles] = {}
            for endpoint in ENDPOINTS:
                system_text, user_text = build_prompt(self.prompt_spec, endpoint, smiles)
                values = []
                for rollout in range(self.rollout_cfg.rollouts):
                    reply = self.client.complete(
                        system_text, user_text, self.rollout_cfg.temperature)
                    try:
                        values.append(parse_reply(reply))
                    except ReplyParseError as exc:
                        failures.append(RolloutFailure(smiles, endpoint, rollout, str(exc)))
                if values:
                    predictions[smiles][endpoint] = aggregate_rollouts(values, self.rollout_cfg)
        return predictions, failures

"""Submission registry: lifecycle store, HTTP service, leaderboard queries."""

from .service import ADMIN_TOKEN_ENV, RegistryApi, RegistryServer, running_registry
from .store import (
    APPROVED,
    EVALUATING,
    FAILED,
    PENDING,
    PRELIMINARY,
    REJECTED,
    REQUIRED_CARD_FIELDS,
    STATUSES,
    TERMINAL_STATUSES,
    TRANSITIONS,
    CardValidationError,
    IllegalTransition,
    ModelCard,
    RegistryError,
    RegistryStore,
    Submission,
    platform_fingerprint,
)

__all__ = [
    "ADMIN_TOKEN_ENV",
    "APPROVED",
    "CardValidationError",
    "EVALUATING",
    "FAILED",
    "IllegalTransition",
    "ModelCard",
    "PENDING",
    "PRELIMINARY",
    "REJECTED",
    "REQUIRED_CARD_FIELDS",
    "RegistryApi",
    "RegistryError",
    "RegistryServer",
    "RegistryStore",
    "STATUSES",
    "Submission",
    "TERMINAL_STATUSES",
    "TRANSITIONS",
    "platform_fingerprint",
    "running_registry",
]

"""Fixed 9,385-wide feature vector: fingerprint + keys + descriptors + patterns."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chem import Molecule
from .descriptors import DESCRIPTOR_COUNT, descriptors
from .fingerprint import DEFAULT_WIDTH, FingerprintConfig, ecfp_counts
from .patterns import match_patterns
from .sets import KEY_ARITY, TOXPATTERN_ARITY, structural_keys, toxicity_patterns


@dataclass(frozen=True)
class FeatureLayout:
    ecfp_width: int = DEFAULT_WIDTH
    key_count: int = KEY_ARITY
    descriptor_count: int = DESCRIPTOR_COUNT
    toxpattern_count: int = TOXPATTERN_ARITY

    @property
    def total(self) -> int:
        return self.ecfp_width + self.key_count + self.descriptor_count + self.toxpattern_count

    @property
    def key_slice(self) -> slice:
        return slice(self.ecfp_width, self.ecfp_width + self.key_count)

    @property
    def descriptor_slice(self) -> slice:
        start = self.ecfp_width + self.key_count
        return slice(start, start + self.descriptor_count)

    @property
    def toxpattern_slice(self) -> slice:
        start = self.ecfp_width + self.key_count + self.descriptor_count
        return slice(start, start + self.toxpattern_count)


LAYOUT = FeatureLayout()
FEATURE_TOTAL = LAYOUT.total  # 9385

assert FEATURE_TOTAL == 9385


def assemble(mol: Molecule, fingerprint_cfg: FingerprintConfig = FingerprintConfig()) -> np.ndarray:
    """Full feature vector for one molecule, in fixed block order."""
    return np.concatenate([
        ecfp_counts(mol, fingerprint_cfg),
        match_patterns(mol, structural_keys()),
        descriptors(mol),
        match_patterns(mol, toxicity_patterns()),
    ])


def assemble_matrix(mols, fingerprint_cfg: FingerprintConfig = FingerprintConfig()) -> np.ndarray:
    """Row-per-molecule feature matrix."""
    rows = [assemble(m, fingerprint_cfg) for m in mols]
    return np.vstack(rows) if rows else np.empty((0, FEATURE_TOTAL))

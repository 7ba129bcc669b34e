"""Molecule featurization: fingerprints, pattern keys, descriptors, pipeline."""

from .descriptors import DESCRIPTOR_COUNT, DESCRIPTOR_NAMES, descriptor_index, descriptors
from .fingerprint import FingerprintConfig, ecfp_counts, environment_identifiers
from .layout import FEATURE_TOTAL, LAYOUT, FeatureLayout, assemble, assemble_matrix
from .patterns import (
    PatternCompileError,
    PatternGraph,
    PatternSet,
    compile_pattern,
    count_matches,
    find_matches,
    match_patterns,
)
from .pipeline import (
    STD_FLOOR,
    FittedPipeline,
    LayoutMismatch,
    PipelineConfig,
    apply_pipeline,
    fit_pipeline,
)
from .sets import (
    KEY_ARITY,
    TOXPATTERN_ARITY,
    descriptor_list,
    parse_pattern_file,
    structural_keys,
    toxicity_patterns,
)

__all__ = [
    "DESCRIPTOR_COUNT",
    "DESCRIPTOR_NAMES",
    "FEATURE_TOTAL",
    "FeatureLayout",
    "FingerprintConfig",
    "FittedPipeline",
    "KEY_ARITY",
    "LAYOUT",
    "LayoutMismatch",
    "PatternCompileError",
    "PatternGraph",
    "PatternSet",
    "PipelineConfig",
    "STD_FLOOR",
    "TOXPATTERN_ARITY",
    "apply_pipeline",
    "assemble",
    "assemble_matrix",
    "compile_pattern",
    "count_matches",
    "descriptor_index",
    "descriptor_list",
    "descriptors",
    "ecfp_counts",
    "environment_identifiers",
    "find_matches",
    "fit_pipeline",
    "match_patterns",
    "parse_pattern_file",
    "structural_keys",
    "toxicity_patterns",
]

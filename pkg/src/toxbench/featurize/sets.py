"""Pattern-set and descriptor-list files.

File formats (UTF-8, '#' comments):
  pattern sets:    index<TAB>pattern<TAB>label
  descriptor list: index<TAB>name
Both are content-hashed so fitted pipelines can pin the exact versions.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from ..hashing import sha256_bytes
from .descriptors import DESCRIPTOR_NAMES
from .patterns import PatternCompileError, PatternSet, compile_pattern

KEY_ARITY = 166
TOXPATTERN_ARITY = 827


def parse_pattern_file(text: str, *, name: str, arity: int, binary: bool) -> PatternSet:
    entries = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{name} line {lineno}: expected index<TAB>pattern<TAB>label")
        index_text, expression, label = parts
        try:
            index = int(index_text)
        except ValueError:
            raise ValueError(f"{name} line {lineno}: bad index {index_text!r}") from None
        if index in seen:
            raise ValueError(f"{name} line {lineno}: duplicate index {index}")
        seen.add(index)
        try:
            graph = compile_pattern(expression)
        except PatternCompileError as exc:
            raise ValueError(f"{name} line {lineno}: {exc}") from exc
        entries.append((index, graph, label))
    return PatternSet(
        name=name,
        arity=arity,
        binary=binary,
        entries=tuple(sorted(entries)),
        content_hash=sha256_bytes(text.encode("utf-8")),
    )


def _read_resource(filename: str) -> str:
    return resources.files("toxbench.data").joinpath(filename).read_text("utf-8")


@lru_cache(maxsize=None)
def structural_keys() -> PatternSet:
    return parse_pattern_file(
        _read_resource("structural_keys.tsv"),
        name="structural_keys", arity=KEY_ARITY, binary=True)


@lru_cache(maxsize=None)
def toxicity_patterns() -> PatternSet:
    return parse_pattern_file(
        _read_resource("toxicity_patterns.tsv"),
        name="toxicity_patterns", arity=TOXPATTERN_ARITY, binary=False)


def parse_descriptor_file(text: str) -> tuple[str, ...]:
    names = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"descriptor list line {lineno}: expected index<TAB>name")
        names[int(parts[0])] = parts[1]
    return tuple(names[i] for i in sorted(names))


@lru_cache(maxsize=None)
def descriptor_list() -> tuple[str, ...]:
    """Names from the shipped descriptor file; must match the code registry."""
    names = parse_descriptor_file(_read_resource("descriptors.tsv"))
    if names != DESCRIPTOR_NAMES:
        raise RuntimeError("descriptors.tsv out of sync with the descriptor registry")
    return names


@lru_cache(maxsize=None)
def layout_content_hashes() -> dict[str, str]:
    """Content hashes of the shipped layout files, recorded in pipelines."""
    return {
        "structural_keys": structural_keys().content_hash,
        "toxicity_patterns": toxicity_patterns().content_hash,
        "descriptors": sha256_bytes(_read_resource("descriptors.tsv").encode("utf-8")),
    }

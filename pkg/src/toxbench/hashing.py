"""Stable hashing primitives shared across the package.

Feature hashing must be bit-identical across platforms and Python builds,
so nothing here uses Python's builtin ``hash`` (salted per process) or
anything endianness-dependent.
"""

from __future__ import annotations

import hashlib
import json
from typing import Iterable

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a of a byte string."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def encode_tuple(items: Iterable) -> bytes:
    """Canonical little-endian byte encoding of a flat tuple.

    Supported element types: int (signed, 8 bytes two's complement),
    bool (1 byte), str (utf-8, length-prefixed). Nested tuples/lists are
    encoded recursively with a length prefix so (1, (2, 3)) != (1, 2, 3).
    """
    out = bytearray()
    for item in items:
        if isinstance(item, bool):
            out.append(0x01)
            out.append(1 if item else 0)
        elif isinstance(item, int):
            out.append(0x02)
            out += (item & _MASK64).to_bytes(8, "little")
        elif isinstance(item, str):
            raw = item.encode("utf-8")
            out.append(0x03)
            out += len(raw).to_bytes(4, "little")
            out += raw
        elif isinstance(item, (tuple, list)):
            inner = encode_tuple(item)
            out.append(0x04)
            out += len(inner).to_bytes(4, "little")
            out += inner
        else:
            raise TypeError(f"unhashable element type: {type(item).__name__}")
    return bytes(out)


def hash_tuple(*items) -> int:
    """Stable 64-bit hash of a flat tuple of ints/bools/strings/tuples."""
    return fnv1a64(encode_tuple(items))


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, compact separators, shortest floats."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_json(obj) -> str:
    return sha256_bytes(canonical_json(obj).encode("utf-8"))

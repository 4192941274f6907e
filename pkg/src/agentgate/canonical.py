"""Canonical serialization and content hashing shared by the ledger and drift modules.

Every digest in the system is SHA-256 over the canonical JSON form: keys
sorted, minimal separators, UTF-8, no NaN/Infinity. Floats use Python's
shortest round-trip repr, which is stable for equal binary values, so equal
inputs always map to equal digests.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

ZERO_HASH = "0" * 64


def canonical_json(obj: Any) -> str:
    """Serialize *obj* to its canonical JSON string."""
    return json.dumps(
        obj,
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
    )


def canonical_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")


def sha256_hex(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def digest(obj: Any) -> str:
    """SHA-256 hex digest of the canonical JSON form of *obj*."""
    return sha256_hex(canonical_bytes(obj))

"""Canonical serialization and hashing used everywhere in the platform.

One hash function (SHA-256, 32-byte digests) is used for block hashes,
state roots, document content ids and notarization digests, so digests
from different subsystems are directly comparable.  Canonical JSON is
the byte form that gets hashed: sorted keys, no whitespace, UTF-8.
Ledger state never contains floats, which keeps the encoding exact.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

DIGEST_SIZE = 32
ADDRESS_SIZE = 20

ZERO_DIGEST = "00" * DIGEST_SIZE


def canonical_json(value: Any) -> bytes:
    """Serialize ``value`` to canonical JSON bytes (sorted keys, compact)."""
    return json.dumps(
        value, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def digest(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def digest_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def doc_digest_hex(value: Any) -> str:
    """Hex digest of the canonical JSON form of ``value``."""
    return digest_hex(canonical_json(value))


def address_from_public_key(public_key_bytes: bytes) -> str:
    """Derive an account address: trailing 20 bytes of the key's digest, hex."""
    return digest(public_key_bytes)[-ADDRESS_SIZE:].hex()


def is_address(text: str) -> bool:
    if len(text) != ADDRESS_SIZE * 2:
        return False
    try:
        bytes.fromhex(text)
    except ValueError:
        return False
    return True


def is_digest_hex(text: str) -> bool:
    if len(text) != DIGEST_SIZE * 2:
        return False
    try:
        bytes.fromhex(text)
    except ValueError:
        return False
    return True


def flatten_doc(value: Any, prefix: str = "") -> dict[str, Any]:
    """Flatten a nested JSON document into ``path -> scalar`` entries.

    Used by the gas meter to count storage slots: every scalar leaf of
    the persistent state occupies one slot, keyed by its path.
    """
    flat: dict[str, Any] = {}
    if isinstance(value, dict):
        if not value:
            flat[prefix + "{}"] = None
        for key, item in value.items():
            flat.update(flatten_doc(item, f"{prefix}{key}/"))
    elif isinstance(value, list):
        if not value:
            flat[prefix + "[]"] = None
        for index, item in enumerate(value):
            flat.update(flatten_doc(item, f"{prefix}{index}/"))
    else:
        flat[prefix.rstrip("/")] = value
    return flat

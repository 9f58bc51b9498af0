"""Key pairs, signing and address derivation.

The signature scheme is pluggable behind :class:`KeyPair`; the default is
Ed25519.  Test and demo deployments derive keys deterministically from
string seeds, so fixture chains are reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .canonical import address_from_public_key, digest
from .errors import SignatureError


@dataclass(frozen=True)
class KeyPair:
    """An Ed25519 key pair plus the ledger address derived from it."""

    private_bytes: bytes
    public_bytes: bytes
    address: str

    def sign(self, payload: bytes) -> bytes:
        key = Ed25519PrivateKey.from_private_bytes(self.private_bytes)
        return key.sign(payload)


def keypair_from_private_bytes(private_bytes: bytes) -> KeyPair:
    if len(private_bytes) != 32:
        raise SignatureError("private key material must be exactly 32 bytes")
    key = Ed25519PrivateKey.from_private_bytes(private_bytes)
    public = key.public_key().public_bytes_raw()
    return KeyPair(private_bytes, public, address_from_public_key(public))


def keypair_from_seed(seed: str) -> KeyPair:
    """Derive a deterministic key pair from an arbitrary seed string."""
    return keypair_from_private_bytes(digest(seed.encode("utf-8")))


def verify_signature(public_bytes: bytes, payload: bytes, signature: bytes) -> bool:
    try:
        Ed25519PublicKey.from_public_bytes(public_bytes).verify(signature, payload)
    except (InvalidSignature, ValueError):
        return False
    return True

"""Encrypted operator keystore.

The service signs ledger transactions on behalf of operators, so their
private keys live in one passphrase-protected file: PBKDF2-derived
Fernet encryption per entry, plus a canary entry so a wrong passphrase
is detected before any signing is attempted.
"""

from __future__ import annotations

import base64
import json
import os
from pathlib import Path

from cryptography.fernet import Fernet, InvalidToken
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.pbkdf2 import PBKDF2HMAC

from ..crypto import KeyPair, keypair_from_private_bytes
from ..errors import KeystoreError

_CANARY = b"agritrace-keystore"
_ITERATIONS = 60_000


def _derive_fernet(passphrase: str, salt: bytes, iterations: int) -> Fernet:
    kdf = PBKDF2HMAC(algorithm=SHA256(), length=32, salt=salt, iterations=iterations)
    key = base64.urlsafe_b64encode(kdf.derive(passphrase.encode("utf-8")))
    return Fernet(key)


class Keystore:
    """Maps actor ids to encrypted signing keys."""

    def __init__(self, path: Path, fernet: Fernet, doc: dict):
        self._path = path
        self._fernet = fernet
        self._doc = doc

    @classmethod
    def create(cls, path: str | Path, passphrase: str) -> "Keystore":
        path = Path(path)
        if path.exists():
            raise KeystoreError(f"keystore already exists at {path}")
        salt = os.urandom(16)
        fernet = _derive_fernet(passphrase, salt, _ITERATIONS)
        doc = {
            "kdf": {"salt": salt.hex(), "iterations": _ITERATIONS},
            "canary": fernet.encrypt(_CANARY).decode("ascii"),
            "entries": {},
        }
        store = cls(path, fernet, doc)
        store._save()
        return store

    @classmethod
    def open(cls, path: str | Path, passphrase: str) -> "Keystore":
        path = Path(path)
        try:
            doc = json.loads(path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise KeystoreError(f"cannot read keystore {path}: {exc}") from exc
        try:
            salt = bytes.fromhex(doc["kdf"]["salt"])
            iterations = int(doc["kdf"]["iterations"])
        except (KeyError, TypeError, ValueError) as exc:
            raise KeystoreError(f"malformed keystore {path}") from exc
        fernet = _derive_fernet(passphrase, salt, iterations)
        store = cls(path, fernet, doc)
        if not store.verify_passphrase():
            raise KeystoreError("wrong keystore passphrase")
        return store

    def verify_passphrase(self) -> bool:
        try:
            return self._fernet.decrypt(self._doc["canary"].encode("ascii")) == _CANARY
        except (InvalidToken, KeyError):
            return False

    def check_passphrase(self, passphrase: str) -> bool:
        """Test a candidate passphrase against the stored canary."""
        try:
            salt = bytes.fromhex(self._doc["kdf"]["salt"])
            iterations = int(self._doc["kdf"]["iterations"])
            fernet = _derive_fernet(passphrase, salt, iterations)
            return fernet.decrypt(self._doc["canary"].encode("ascii")) == _CANARY
        except (InvalidToken, KeyError, ValueError):
            return False

    def _save(self) -> None:
        self._path.write_text(json.dumps(self._doc, indent=2, sort_keys=True) + "\n", "utf-8")

    def put_key(self, actor_id: str, private_bytes: bytes) -> KeyPair:
        keypair = keypair_from_private_bytes(private_bytes)
        token = self._fernet.encrypt(private_bytes).decode("ascii")
        self._doc["entries"][actor_id] = token
        self._save()
        return keypair

    def keypair(self, actor_id: str) -> KeyPair:
        token = self._doc["entries"].get(actor_id)
        if token is None:
            raise KeystoreError(f"no key stored for actor {actor_id!r}")
        try:
            private_bytes = self._fernet.decrypt(token.encode("ascii"))
        except InvalidToken as exc:
            raise KeystoreError(f"cannot decrypt key for actor {actor_id!r}") from exc
        return keypair_from_private_bytes(private_bytes)

    def actor_ids(self) -> list[str]:
        return sorted(self._doc["entries"])

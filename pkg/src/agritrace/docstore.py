"""Local content-addressed document store.

Stands in for a distributed off-chain repository: objects are named by
the hex digest of their bytes, so identical content maps to one id and
any tampering with the stored file is detected on retrieval.  The store
is append-only; nothing is ever deleted.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .canonical import digest_hex, is_digest_hex
from .errors import DocStoreError, DocumentNotFoundError, IntegrityError

INDEX_NAME = "index.json"
OBJECTS_DIR = "objects"


@dataclass(frozen=True)
class StoredObject:
    content_id: str
    size: int
    media_type: str
    created: int


class DocStore:
    """Flat directory of objects named by content id, plus an index file."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / OBJECTS_DIR).mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / INDEX_NAME
        if not self._index_path.exists():
            self._write_index({})

    def _read_index(self) -> dict:
        try:
            return json.loads(self._index_path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DocStoreError(f"document index unreadable: {exc}") from exc

    def _write_index(self, index: dict) -> None:
        handle = tempfile.NamedTemporaryFile(
            "w", dir=self.root, delete=False, encoding="utf-8"
        )
        with handle:
            json.dump(index, handle, indent=2, sort_keys=True)
        os.replace(handle.name, self._index_path)

    def _object_path(self, content_id: str) -> Path:
        return self.root / OBJECTS_DIR / content_id

    def put(self, content: bytes, media_type: str = "application/octet-stream") -> str:
        """Store ``content`` and return its content id.

        Idempotent: identical bytes always yield the same id and are
        stored once.  Empty documents are rejected.
        """
        if not content:
            raise DocStoreError("empty documents cannot be notarized")
        content_id = digest_hex(content)
        path = self._object_path(content_id)
        if not path.exists():
            handle = tempfile.NamedTemporaryFile("wb", dir=self.root, delete=False)
            with handle:
                handle.write(content)
            os.replace(handle.name, path)
            index = self._read_index()
            index[content_id] = {
                "size": len(content),
                "media_type": media_type,
                "created": int(time.time()),
            }
            self._write_index(index)
        return content_id

    def get(self, content_id: str) -> bytes:
        """Return the stored bytes, verifying the digest before release."""
        if not is_digest_hex(content_id):
            raise DocumentNotFoundError(f"{content_id!r} is not a valid content id")
        path = self._object_path(content_id)
        if not path.exists():
            raise DocumentNotFoundError(f"no document stored under {content_id}")
        content = path.read_bytes()
        if digest_hex(content) != content_id:
            raise IntegrityError(
                f"stored bytes for {content_id} no longer match their content id"
            )
        return content

    def stat(self, content_id: str) -> StoredObject:
        index = self._read_index()
        meta = index.get(content_id)
        if meta is None:
            raise DocumentNotFoundError(f"no document stored under {content_id}")
        return StoredObject(
            content_id=content_id,
            size=meta["size"],
            media_type=meta["media_type"],
            created=meta["created"],
        )

    def contains(self, content_id: str) -> bool:
        return self._object_path(content_id).exists()

    def locator_for(self, content_id: str) -> str:
        """URI under which a stored object is retrievable."""
        return f"docstore://{content_id}"

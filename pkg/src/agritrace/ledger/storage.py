"""Append-only chain file: length-prefixed block records.

Each record is a 4-byte big-endian length followed by the canonical
JSON encoding of the block.  Records are only ever appended; loading a
chain replays every record in order.
"""

from __future__ import annotations

import struct
from pathlib import Path

from ..canonical import canonical_json
from ..errors import ChainStoreError

_LENGTH = struct.Struct(">I")


def write_block_record(handle, doc: dict) -> None:
    payload = canonical_json(doc)
    handle.write(_LENGTH.pack(len(payload)))
    handle.write(payload)


def iter_raw_records(path: str | Path):
    """Yield ``(index, start_offset, end_offset, payload_bytes)`` per record.

    Raises :class:`ChainStoreError` naming the record index when a
    length prefix or payload is truncated or oversized.
    """
    data = Path(path).read_bytes()
    offset = 0
    index = 0
    while offset < len(data):
        if offset + _LENGTH.size > len(data):
            raise ChainStoreError(f"record {index}: truncated length prefix")
        (length,) = _LENGTH.unpack_from(data, offset)
        start = offset
        offset += _LENGTH.size
        if offset + length > len(data):
            raise ChainStoreError(f"record {index}: truncated payload")
        yield index, start, offset + length, data[offset : offset + length]
        offset += length
        index += 1


def read_block_records(path: str | Path) -> list[dict]:
    """Parse every record in the chain file into its block document."""
    import json

    records = []
    for index, _start, _end, payload in iter_raw_records(path):
        try:
            doc = json.loads(payload.decode("utf-8"))
        except (UnicodeDecodeError, ValueError) as exc:
            raise ChainStoreError(f"record {index}: invalid block encoding: {exc}") from exc
        if not isinstance(doc, dict):
            raise ChainStoreError(f"record {index}: block record must be an object")
        records.append(doc)
    return records

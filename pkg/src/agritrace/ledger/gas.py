"""Gas accounting with two storage classes.

Persistent contract state is billed per 32-byte slot and is by far the
most expensive place to put data; the event log is billed per byte and
is readable only by external applications.  Event payloads therefore go
to the log, which is what makes recording rich traceability data
affordable.  Defaults mirror the public Ethereum schedule but any
schedule can be loaded from a JSON file.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from ..errors import GasError

STORAGE_MODES = ("persistent", "log")

SLOT_BYTES = 32


@dataclass(frozen=True)
class GasSchedule:
    base_tx_cost: int = 21000
    calldata_cost_per_byte: int = 16
    storage_new_slot_cost: int = 20000
    storage_update_cost: int = 5000
    log_base_cost: int = 375
    log_topic_cost: int = 375
    log_cost_per_byte: int = 8

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise GasError(f"gas schedule field {name} must be a non-negative integer")
        # The storage/log tradeoff only exists while a fresh slot costs
        # more than logging the same 32 bytes.
        if self.storage_new_slot_cost <= self.log_cost_per_byte * SLOT_BYTES:
            raise GasError(
                "storage_new_slot_cost must exceed the log cost of one slot's worth of bytes"
            )

    def to_doc(self) -> dict:
        return asdict(self)

    @classmethod
    def from_doc(cls, doc: dict) -> "GasSchedule":
        unknown = sorted(set(doc) - set(cls.__dataclass_fields__))
        if unknown:
            raise GasError(f"unknown gas schedule field(s): {', '.join(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path: str | Path) -> "GasSchedule":
        try:
            doc = json.loads(Path(path).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise GasError(f"cannot load gas schedule from {path}: {exc}") from exc
        return cls.from_doc(doc)


DEFAULT_GAS_SCHEDULE = GasSchedule()


def estimate_gas(
    schedule: GasSchedule,
    payload_size: int,
    storage_mode: str,
    topics: int = 1,
    updated_slots: int = 0,
) -> int:
    """Estimate the cost of registering ``payload_size`` bytes.

    ``persistent`` writes the payload into contract storage (one new
    slot per started 32 bytes, plus any rewritten existing slots);
    ``log`` emits it as an event-log entry.  Calldata is charged in both
    modes.
    """
    if payload_size < 0:
        raise GasError("payload size must be non-negative")
    if storage_mode == "persistent":
        slots = -(-payload_size // SLOT_BYTES)
        return (
            schedule.base_tx_cost
            + schedule.calldata_cost_per_byte * payload_size
            + schedule.storage_new_slot_cost * slots
            + schedule.storage_update_cost * updated_slots
        )
    if storage_mode == "log":
        return (
            schedule.base_tx_cost
            + schedule.calldata_cost_per_byte * payload_size
            + schedule.log_base_cost
            + schedule.log_topic_cost * topics
            + schedule.log_cost_per_byte * payload_size
        )
    raise GasError(f"unknown storage mode {storage_mode!r}")

"""Full-chain verification: recompute every hash, signature and state root.

Verification replays the chain from the genesis state embedded in the
first record, re-executing every transaction through the same
deterministic executor the live chain uses.  Any divergence between
stored and recomputed values -- hashes, gas, log entries, state roots --
is reported at the first block where it appears.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..canonical import ZERO_DIGEST, doc_digest_hex
from ..errors import ChainStoreError, LedgerError, TraceabilityError
from .chain import Block, LogEntry, OperationHandler, Transaction, block_hash, execute_transaction
from .gas import GasSchedule
from .storage import iter_raw_records

_BLOCK_FIELDS = {
    "height",
    "parent_hash",
    "timestamp",
    "state_root",
    "hash",
    "transactions",
    "log_entries",
}


@dataclass(frozen=True)
class Failure:
    block_height: int
    check: str
    detail: str

    def __str__(self) -> str:
        return f"block {self.block_height}: {self.check}: {self.detail}"


@dataclass
class VerificationReport:
    ok: bool
    blocks_checked: int
    failures: list[Failure] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "ok": self.ok,
            "blocks_checked": self.blocks_checked,
            "failures": [
                {"block": f.block_height, "check": f.check, "detail": f.detail}
                for f in self.failures
            ],
        }


def _fail(index: int, check: str, detail: str) -> VerificationReport:
    return VerificationReport(ok=False, blocks_checked=index, failures=[Failure(index, check, detail)])


def verify_records_full(
    path: str | Path,
    operations: dict[str, OperationHandler],
    schedule: GasSchedule,
) -> tuple[VerificationReport, dict, list[Block], dict]:
    """Verify a chain file; also return the replayed state and blocks.

    Stops at the first divergence.  The returned state/blocks are only
    meaningful when the report is ok.
    """
    state: dict = {}
    blocks: list[Block] = []
    genesis_state: dict = {}
    index = 0
    try:
        records = []
        for index, _start, _end, payload in iter_raw_records(path):
            try:
                doc = json.loads(payload.decode("utf-8"))
            except (UnicodeDecodeError, ValueError) as exc:
                return _fail(index, "record-encoding", str(exc)), state, blocks, genesis_state
            if not isinstance(doc, dict):
                return (
                    _fail(index, "record-encoding", "block record must be an object"),
                    state,
                    blocks,
                    genesis_state,
                )
            records.append(doc)
    except ChainStoreError as exc:
        return _fail(index, "record-framing", exc.message), state, blocks, genesis_state

    if not records:
        return _fail(0, "empty-chain", "chain file holds no records"), state, blocks, genesis_state

    for height, doc in enumerate(records):
        allowed = _BLOCK_FIELDS | ({"genesis_state"} if height == 0 else set())
        missing = sorted(allowed - set(doc))
        extra = sorted(set(doc) - allowed)
        if missing or extra:
            detail = f"missing fields {missing}, unexpected fields {extra}"
            return _fail(height, "block-fields", detail), state, blocks, genesis_state
        if doc["height"] != height:
            return (
                _fail(height, "height-sequence", f"stored height {doc['height']} at record {height}"),
                state,
                blocks,
                genesis_state,
            )
        expected_parent = ZERO_DIGEST if height == 0 else blocks[-1].hash
        if doc["parent_hash"] != expected_parent:
            return (
                _fail(height, "parent-link", "parent hash does not match previous block"),
                state,
                blocks,
                genesis_state,
            )

        if height == 0:
            if doc["transactions"]:
                return (
                    _fail(0, "genesis-transactions", "genesis block must hold no transactions"),
                    state,
                    blocks,
                    genesis_state,
                )
            if not isinstance(doc["genesis_state"], dict):
                return (
                    _fail(0, "genesis-state", "embedded genesis state must be an object"),
                    state,
                    blocks,
                    genesis_state,
                )
            genesis_state = doc["genesis_state"]
            state = copy.deepcopy(genesis_state)

        transactions: list[Transaction] = []
        replayed_logs: list[LogEntry] = []
        for tx_index, tx_doc in enumerate(doc["transactions"]):
            where = f"transaction {tx_index}"
            try:
                tx = Transaction.from_doc(tx_doc)
            except ChainStoreError as exc:
                return _fail(height, "tx-encoding", f"{where}: {exc.message}"), state, blocks, genesis_state
            if tx_doc.get("hash") != tx.hash:
                return (
                    _fail(height, "tx-hash", f"{where}: stored hash does not match contents"),
                    state,
                    blocks,
                    genesis_state,
                )
            try:
                gas, entries, _result = execute_transaction(
                    state, tx, operations, schedule, height
                )
            except (LedgerError, TraceabilityError) as exc:
                return (
                    _fail(height, "tx-execution", f"{where}: {exc}"),
                    state,
                    blocks,
                    genesis_state,
                )
            if gas != tx.gas_used:
                return (
                    _fail(
                        height,
                        "gas-mismatch",
                        f"{where}: replayed gas {gas} != stored {tx.gas_used}",
                    ),
                    state,
                    blocks,
                    genesis_state,
                )
            transactions.append(tx)
            replayed_logs.extend(entries)

        try:
            stored_logs = [LogEntry.from_doc(entry) for entry in doc["log_entries"]]
        except ChainStoreError as exc:
            return _fail(height, "log-encoding", exc.message), state, blocks, genesis_state
        if stored_logs != replayed_logs:
            return (
                _fail(height, "log-mismatch", "stored log entries differ from replay"),
                state,
                blocks,
                genesis_state,
            )

        replayed_root = doc_digest_hex(state)
        if doc["state_root"] != replayed_root:
            return (
                _fail(height, "state-root", "stored state root differs from replay"),
                state,
                blocks,
                genesis_state,
            )

        recomputed = block_hash(
            height, doc["parent_hash"], doc["timestamp"], doc["state_root"], [t.hash for t in transactions]
        )
        if doc["hash"] != recomputed:
            return (
                _fail(height, "block-hash", "stored block hash does not match contents"),
                state,
                blocks,
                genesis_state,
            )
        if not isinstance(doc["timestamp"], int) or isinstance(doc["timestamp"], bool):
            return _fail(height, "timestamp", "timestamp must be an integer"), state, blocks, genesis_state

        blocks.append(
            Block(
                height=height,
                parent_hash=doc["parent_hash"],
                timestamp=doc["timestamp"],
                state_root=doc["state_root"],
                transactions=transactions,
                log_entries=stored_logs,
            )
        )

    return VerificationReport(ok=True, blocks_checked=len(blocks)), state, blocks, genesis_state


def verify_chain_file(
    path: str | Path,
    operations: dict[str, OperationHandler],
    schedule: GasSchedule,
) -> VerificationReport:
    report, _state, _blocks, _genesis = verify_records_full(path, operations, schedule)
    return report


def verify_records(
    path: str | Path,
    operations: dict[str, OperationHandler],
    schedule: GasSchedule,
) -> VerificationReport:
    """Alias kept for symmetry with :func:`verify_chain_file`."""
    return verify_chain_file(path, operations, schedule)

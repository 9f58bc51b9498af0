"""Hash-chained block ledger with a single sealer.

State changes enter exclusively through signed transactions dispatched
to registered operation handlers.  Handlers follow a validate-then-apply
discipline, so a contract-level rejection leaves state untouched and is
reported in the receipt rather than raised.  Protocol violations (bad
signature, stale nonce, unknown operation) raise instead.

The persistent state document is canonically serialized into each
block's ``state_root``; gas is metered from the flattened state diff
(one slot per scalar leaf) plus per-byte costs for emitted log entries.
"""

from __future__ import annotations

import copy
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from ..canonical import (
    ZERO_DIGEST,
    canonical_json,
    digest_hex,
    doc_digest_hex,
    flatten_doc,
)
from ..crypto import KeyPair, keypair_from_private_bytes, keypair_from_seed, verify_signature
from ..errors import (
    ChainStoreError,
    ContractError,
    LedgerError,
    NonceError,
    SignatureError,
    UnknownOperationError,
)
from .gas import DEFAULT_GAS_SCHEDULE, GasSchedule
from .storage import write_block_record

OperationHandler = Callable[[dict, "ExecutionContext", dict], dict]


def create_account(seed: str | None = None, private_bytes: bytes | None = None) -> KeyPair:
    """Create an account key pair from a seed string or raw key material.

    The address is a pure function of the public key, so the same seed
    always yields the same address.
    """
    if (seed is None) == (private_bytes is None):
        raise SignatureError("provide exactly one of seed or private key bytes")
    if seed is not None:
        return keypair_from_seed(seed)
    return keypair_from_private_bytes(private_bytes)


def signing_payload(sender: str, nonce: int, operation: str, args: dict) -> bytes:
    return canonical_json(
        {"sender": sender, "nonce": nonce, "operation": operation, "args": args}
    )


@dataclass
class Transaction:
    sender: str
    public_key: bytes
    nonce: int
    operation: str
    args: dict
    signature: bytes
    gas_used: int = 0

    @property
    def hash(self) -> str:
        return digest_hex(
            canonical_json(
                {
                    "sender": self.sender,
                    "public_key": self.public_key.hex(),
                    "nonce": self.nonce,
                    "operation": self.operation,
                    "args": self.args,
                    "signature": self.signature.hex(),
                }
            )
        )

    def to_doc(self) -> dict:
        return {
            "sender": self.sender,
            "public_key": self.public_key.hex(),
            "nonce": self.nonce,
            "operation": self.operation,
            "args": self.args,
            "signature": self.signature.hex(),
            "gas_used": self.gas_used,
            "hash": self.hash,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Transaction":
        try:
            tx = cls(
                sender=doc["sender"],
                public_key=bytes.fromhex(doc["public_key"]),
                nonce=doc["nonce"],
                operation=doc["operation"],
                args=doc["args"],
                signature=bytes.fromhex(doc["signature"]),
                gas_used=doc["gas_used"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ChainStoreError(f"malformed transaction record: {exc}") from exc
        return tx


def make_transaction(keypair: KeyPair, nonce: int, operation: str, args: dict) -> Transaction:
    """Build and sign a transaction with the given account key."""
    payload = signing_payload(keypair.address, nonce, operation, args)
    return Transaction(
        sender=keypair.address,
        public_key=keypair.public_bytes,
        nonce=nonce,
        operation=operation,
        args=args,
        signature=keypair.sign(payload),
    )


@dataclass(frozen=True)
class LogEntry:
    """An event-log record: cheap storage readable only via query APIs."""

    contract: str
    topic: str
    payload: bytes
    tx_hash: str

    def to_doc(self) -> dict:
        return {
            "contract": self.contract,
            "topic": self.topic,
            "payload": self.payload.hex(),
            "tx_hash": self.tx_hash,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "LogEntry":
        try:
            return cls(
                contract=doc["contract"],
                topic=doc["topic"],
                payload=bytes.fromhex(doc["payload"]),
                tx_hash=doc["tx_hash"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ChainStoreError(f"malformed log entry record: {exc}") from exc


def block_hash(
    height: int, parent_hash: str, timestamp: int, state_root: str, tx_hashes: list[str]
) -> str:
    return digest_hex(
        canonical_json(
            {
                "height": height,
                "parent_hash": parent_hash,
                "timestamp": timestamp,
                "state_root": state_root,
                "transactions": tx_hashes,
            }
        )
    )


@dataclass
class Block:
    height: int
    parent_hash: str
    timestamp: int
    state_root: str
    transactions: list[Transaction] = field(default_factory=list)
    log_entries: list[LogEntry] = field(default_factory=list)

    @property
    def hash(self) -> str:
        return block_hash(
            self.height,
            self.parent_hash,
            self.timestamp,
            self.state_root,
            [tx.hash for tx in self.transactions],
        )

    def to_doc(self) -> dict:
        return {
            "height": self.height,
            "parent_hash": self.parent_hash,
            "timestamp": self.timestamp,
            "state_root": self.state_root,
            "hash": self.hash,
            "transactions": [tx.to_doc() for tx in self.transactions],
            "log_entries": [entry.to_doc() for entry in self.log_entries],
        }


class ExecutionContext:
    """Per-transaction services handed to operation handlers."""

    def __init__(self, block_height: int, tx_hash: str, sender: str):
        self.block_height = block_height
        self.tx_hash = tx_hash
        self.sender = sender
        self.log_entries: list[LogEntry] = []

    def emit(self, contract: str, topic: str, payload: bytes) -> None:
        self.log_entries.append(LogEntry(contract, topic, payload, self.tx_hash))


@dataclass
class Receipt:
    status: str
    tx_hash: str
    block_height: int
    gas_used: int = 0
    log_entries: list[LogEntry] = field(default_factory=list)
    result: dict = field(default_factory=dict)
    error_code: str | None = None
    error_message: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_doc(self) -> dict:
        return {
            "status": self.status,
            "tx_hash": self.tx_hash,
            "block_height": self.block_height,
            "gas_used": self.gas_used,
            "log_entries": [entry.to_doc() for entry in self.log_entries],
            "result": self.result,
            "error_code": self.error_code,
            "error_message": self.error_message,
        }


def execute_transaction(
    state: dict,
    tx: Transaction,
    operations: dict[str, OperationHandler],
    schedule: GasSchedule,
    block_height: int,
) -> tuple[int, list[LogEntry], dict]:
    """Validate and run one transaction against ``state``.

    Returns ``(gas_used, log_entries, result)``.  Raises
    :class:`SignatureError`/:class:`NonceError`/:class:`UnknownOperationError`
    for protocol violations and :class:`ContractError` subtypes for
    domain rejections; in every error case ``state`` is unchanged.
    """
    from ..canonical import address_from_public_key

    if address_from_public_key(tx.public_key) != tx.sender:
        raise SignatureError("public key does not match sender address")
    payload = signing_payload(tx.sender, tx.nonce, tx.operation, tx.args)
    if not verify_signature(tx.public_key, payload, tx.signature):
        raise SignatureError("signature verification failed")
    expected_nonce = state.setdefault("nonces", {}).get(tx.sender, 0)
    if tx.nonce != expected_nonce:
        raise NonceError(
            f"nonce {tx.nonce} does not match expected {expected_nonce} for {tx.sender}"
        )
    handler = operations.get(tx.operation)
    if handler is None:
        raise UnknownOperationError(f"unknown operation {tx.operation!r}")
    if not isinstance(tx.args, dict):
        raise ContractError("operation arguments must be an object")

    flat_before = flatten_doc(state)
    ctx = ExecutionContext(block_height, tx.hash, tx.sender)
    result = handler(state, ctx, tx.args)
    state["nonces"][tx.sender] = expected_nonce + 1
    flat_after = flatten_doc(state)

    new_slots = sum(1 for key in flat_after if key not in flat_before)
    updated_slots = sum(
        1 for key, value in flat_after.items() if key in flat_before and flat_before[key] != value
    )
    gas = (
        schedule.base_tx_cost
        + schedule.calldata_cost_per_byte
        * len(canonical_json([tx.operation, tx.args]))
        + schedule.storage_new_slot_cost * new_slots
        + schedule.storage_update_cost * updated_slots
    )
    for entry in ctx.log_entries:
        gas += (
            schedule.log_base_cost
            + schedule.log_topic_cost
            + schedule.log_cost_per_byte * len(entry.payload)
        )
    return gas, ctx.log_entries, result if isinstance(result, dict) else {}


class Chain:
    """The live ledger: pending transactions, sealed blocks, state.

    One writer at a time: :meth:`submit_transaction` and
    :meth:`seal_block` serialize behind a lock.  Reads of sealed blocks
    and log entries are safe concurrently.
    """

    def __init__(
        self,
        state: dict,
        operations: dict[str, OperationHandler],
        schedule: GasSchedule = DEFAULT_GAS_SCHEDULE,
        clock: Callable[[], int] | None = None,
        path: str | Path | None = None,
    ):
        self.state = state
        self.operations = operations
        self.schedule = schedule
        self.clock = clock or (lambda: int(time.time()))
        self.path = Path(path) if path is not None else None
        self.blocks: list[Block] = []
        self._pending: list[Transaction] = []
        self._pending_logs: list[LogEntry] = []
        self._genesis_state: dict = {}
        self._write_gate = threading.Lock()
        self._log_index: dict[str, list[LogEntry]] = {}

    # -- construction --------------------------------------------------

    @classmethod
    def create(
        cls,
        genesis_state: dict,
        operations: dict[str, OperationHandler],
        schedule: GasSchedule = DEFAULT_GAS_SCHEDULE,
        clock: Callable[[], int] | None = None,
        path: str | Path | None = None,
    ) -> "Chain":
        """Start a fresh chain and seal its genesis block."""
        chain = cls(copy.deepcopy(genesis_state), operations, schedule, clock, path)
        chain._genesis_state = copy.deepcopy(genesis_state)
        genesis = Block(
            height=0,
            parent_hash=ZERO_DIGEST,
            timestamp=chain.clock(),
            state_root=doc_digest_hex(chain.state),
        )
        chain.blocks.append(genesis)
        chain._persist_block(genesis)
        return chain

    @classmethod
    def load(
        cls,
        path: str | Path,
        operations: dict[str, OperationHandler],
        schedule: GasSchedule = DEFAULT_GAS_SCHEDULE,
        clock: Callable[[], int] | None = None,
    ) -> "Chain":
        """Rebuild a chain from its file, verifying every record by replay."""
        from .verify import verify_records_full

        report, state, blocks, genesis_state = verify_records_full(path, operations, schedule)
        if not report.ok:
            raise ChainStoreError(f"chain file fails verification: {report.failures[0]}")
        chain = cls(state, operations, schedule, clock, path)
        chain.blocks = blocks
        chain._genesis_state = genesis_state
        for block in blocks:
            for entry in block.log_entries:
                chain._log_index.setdefault(entry.tx_hash, []).append(entry)
        return chain

    # -- mutation ------------------------------------------------------

    def submit_transaction(self, tx: Transaction) -> Receipt:
        """Execute ``tx`` and queue it for the next block.

        Contract-level rejections return a ``rejected`` receipt with the
        state untouched; protocol violations raise.
        """
        with self._write_gate:
            height = len(self.blocks)
            try:
                gas, entries, result = execute_transaction(
                    self.state, tx, self.operations, self.schedule, height
                )
            except ContractError as exc:
                return Receipt(
                    status="rejected",
                    tx_hash=tx.hash,
                    block_height=height,
                    error_code=exc.code,
                    error_message=exc.message,
                )
            tx.gas_used = gas
            self._pending.append(tx)
            self._pending_logs.extend(entries)
            return Receipt(
                status="ok",
                tx_hash=tx.hash,
                block_height=height,
                gas_used=gas,
                log_entries=entries,
                result=result,
            )

    def seal_block(self) -> Block:
        """Commit pending transactions into a new block (may be empty)."""
        with self._write_gate:
            block = Block(
                height=len(self.blocks),
                parent_hash=self.blocks[-1].hash,
                timestamp=self.clock(),
                state_root=doc_digest_hex(self.state),
                transactions=self._pending,
                log_entries=self._pending_logs,
            )
            self.blocks.append(block)
            for entry in block.log_entries:
                self._log_index.setdefault(entry.tx_hash, []).append(entry)
            self._pending = []
            self._pending_logs = []
            self._persist_block(block)
            return block

    def _persist_block(self, block: Block) -> None:
        if self.path is None:
            return
        doc = block.to_doc()
        if block.height == 0:
            doc["genesis_state"] = self._genesis_state
        with open(self.path, "ab") as handle:
            write_block_record(handle, doc)
            handle.flush()

    # -- queries -------------------------------------------------------

    @property
    def height(self) -> int:
        return self.blocks[-1].height

    @property
    def chain_id(self) -> str:
        return self.blocks[0].hash[:12]

    def next_nonce(self, address: str) -> int:
        return self.state.get("nonces", {}).get(address, 0)

    def log_entries_for_tx(self, tx_hash: str) -> list[LogEntry]:
        entries = list(self._log_index.get(tx_hash, []))
        entries.extend(e for e in self._pending_logs if e.tx_hash == tx_hash)
        return entries

    def find_log_entries(
        self, contract: str | None = None, topic: str | None = None
    ) -> list[LogEntry]:
        found = []
        for block in self.blocks:
            for entry in block.log_entries:
                if contract is not None and entry.contract != contract:
                    continue
                if topic is not None and entry.topic != topic:
                    continue
                found.append(entry)
        return found

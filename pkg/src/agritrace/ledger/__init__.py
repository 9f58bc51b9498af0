"""Simulated permissioned ledger: accounts, blocks, gas and verification."""

from .gas import DEFAULT_GAS_SCHEDULE, GasSchedule, estimate_gas
from .chain import (
    Block,
    Chain,
    ExecutionContext,
    LogEntry,
    Receipt,
    Transaction,
    create_account,
    make_transaction,
)
from .storage import iter_raw_records, read_block_records, write_block_record
from .verify import VerificationReport, verify_chain_file, verify_records

__all__ = [
    "Block",
    "Chain",
    "DEFAULT_GAS_SCHEDULE",
    "ExecutionContext",
    "GasSchedule",
    "LogEntry",
    "Receipt",
    "Transaction",
    "VerificationReport",
    "create_account",
    "estimate_gas",
    "iter_raw_records",
    "make_transaction",
    "read_block_records",
    "verify_chain_file",
    "verify_records",
    "write_block_record",
]

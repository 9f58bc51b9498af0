"""Domain state machines executed inside ledger transactions."""

from .params import (
    canonical_value,
    decode_parameters,
    encode_parameters,
    make_hashlink,
    split_hashlink,
)
from .state import World
from .ops import OP_IDS, build_operations

__all__ = [
    "OP_IDS",
    "World",
    "build_operations",
    "canonical_value",
    "decode_parameters",
    "encode_parameters",
    "make_hashlink",
    "split_hashlink",
]

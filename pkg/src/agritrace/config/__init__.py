"""Parsing and validation of the five supply-chain descriptor files."""

from .model import (
    ActivityDef,
    ActorDef,
    CompanyDef,
    DESCRIPTOR_KINDS,
    EventKindDef,
    KindDef,
    PARAM_TYPES,
    ParamSpec,
    RESERVED_EVENT_KIND_IDS,
    ROLES,
    SupplyChainConfig,
)
from .loader import (
    load_config_dir,
    parse_descriptor,
    serialize_config,
    write_config_dir,
)
from .validate import Violation, validate_config

__all__ = [
    "ActivityDef",
    "ActorDef",
    "CompanyDef",
    "DESCRIPTOR_KINDS",
    "EventKindDef",
    "KindDef",
    "PARAM_TYPES",
    "ParamSpec",
    "RESERVED_EVENT_KIND_IDS",
    "ROLES",
    "SupplyChainConfig",
    "Violation",
    "load_config_dir",
    "parse_descriptor",
    "serialize_config",
    "validate_config",
    "write_config_dir",
]

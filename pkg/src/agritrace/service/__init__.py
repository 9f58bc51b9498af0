"""Operational surface: operator keystore, service node, HTTP API, CLI."""

from .keystore import Keystore
from .runtime import Node

__all__ = ["Keystore", "Node"]

"""Provenance navigation over the origins/produced DAG.

Backward traversal expands a final product into the full ancestor tree
a consumer sees after scanning the QR payload; forward traversal lists
every downstream descendant of a resource or lot.  Both directions are
read-only views over sealed chain state.  Because ``origins`` is frozen
at creation and only references pre-existing entities, the graph is
acyclic by construction and traversal always terminates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .canonical import is_address
from .config.model import SupplyChainConfig
from .contracts.params import decode_parameters
from .errors import TraceQueryError, UnknownEntityError
from .ledger.chain import Chain

QR_SCHEME = "trace"


@dataclass(frozen=True)
class QrPayload:
    """URI printed on the final product: ``trace://<chain-id>/product/<address>``."""

    chain_id: str
    address: str

    def render(self) -> str:
        return f"{QR_SCHEME}://{self.chain_id}/product/{self.address}"


def parse_qr_payload(text: str) -> QrPayload:
    prefix = f"{QR_SCHEME}://"
    if not text.startswith(prefix):
        raise TraceQueryError(f"QR payload must start with {prefix!r}")
    rest = text[len(prefix):]
    parts = rest.split("/")
    if len(parts) != 3 or parts[1] != "product":
        raise TraceQueryError("QR payload must have the form trace://<chain>/product/<address>")
    chain_id, _, address = parts
    if not chain_id:
        raise TraceQueryError("QR payload is missing the chain id")
    if not is_address(address):
        raise TraceQueryError(f"{address!r} is not a valid entity address")
    return QrPayload(chain_id=chain_id, address=address)


@dataclass
class EventSummary:
    event_kind_id: str
    event_class: str
    registrant: str
    block_height: int
    tx_hash: str
    parameters: list[tuple[str, str, str]]
    asseverators: list[str]

    @property
    def asseveration_count(self) -> int:
        return len(self.asseverators)

    def to_doc(self) -> dict:
        return {
            "event_kind_id": self.event_kind_id,
            "event_class": self.event_class,
            "registrant": self.registrant,
            "block_height": self.block_height,
            "tx_hash": self.tx_hash,
            "parameters": [list(triple) for triple in self.parameters],
            "asseveration_count": self.asseveration_count,
            "asseverators": list(self.asseverators),
        }


@dataclass
class TraceNode:
    address: str
    kind_id: str
    kind_name: str
    entity_class: str
    status: str
    company: str
    quantity: int
    unit: str
    events: list[EventSummary] = field(default_factory=list)
    children: list["TraceNode"] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "address": self.address,
            "kind_id": self.kind_id,
            "kind_name": self.kind_name,
            "entity_class": self.entity_class,
            "status": self.status,
            "company": self.company,
            "quantity": self.quantity,
            "unit": self.unit,
            "events": [event.to_doc() for event in self.events],
            "children": [child.to_doc() for child in self.children],
        }

    def leaves(self) -> list["TraceNode"]:
        if not self.children:
            return [self]
        found: list[TraceNode] = []
        for child in self.children:
            found.extend(child.leaves())
        return found


class TraceReader:
    """Builds provenance views from a validated config and a chain."""

    def __init__(self, config: SupplyChainConfig, chain: Chain):
        self.config = config
        self.chain = chain

    def _entity(self, address: str) -> dict:
        entity = self.chain.state["entities"].get(address)
        if entity is None:
            raise UnknownEntityError(f"unknown entity {address}")
        return entity

    def _company_of(self, entity: dict) -> str:
        producer = self.chain.state["producers"].get(entity["producer"], {})
        return producer.get("company", "")

    def _decode_event(self, entity_address: str, event: dict) -> EventSummary:
        parameters: list[tuple[str, str, str]] = []
        for entry in self.chain.log_entries_for_tx(event["tx_hash"]):
            if entry.contract == entity_address and entry.topic == event["event_kind_id"]:
                parameters = decode_parameters(entry.payload)
                break
        return EventSummary(
            event_kind_id=event["event_kind_id"],
            event_class=event["event_class"],
            registrant=event["registrant"],
            block_height=event["block_height"],
            tx_hash=event["tx_hash"],
            parameters=parameters,
            asseverators=[a["certifier"] for a in event["asseverations"]],
        )

    def _node(self, address: str) -> TraceNode:
        entity = self._entity(address)
        kind = self.config.kinds.get(entity["kind_id"])
        events = [self._decode_event(address, event) for event in reversed(entity["events"])]
        return TraceNode(
            address=address,
            kind_id=entity["kind_id"],
            kind_name=kind.name if kind else entity["kind_id"],
            entity_class=entity["class"],
            status=entity["status"],
            company=self._company_of(entity),
            quantity=entity["quantity"],
            unit=entity["unit"],
            events=events,
        )

    def trace_back(self, address: str, max_depth: int | None = None) -> TraceNode:
        """Expand the full ancestor tree of ``address`` through origins.

        Shared ancestors appear once per path; every node carries its
        stable entity address so clients can deduplicate.  Productive
        resources are leaves.
        """
        node = self._node(address)
        if max_depth is not None and max_depth <= 0:
            return node
        entity = self._entity(address)
        for origin in entity.get("origins", []):
            node.children.append(
                self.trace_back(origin, None if max_depth is None else max_depth - 1)
            )
        return node

    def trace_forward(self, address: str) -> list[dict]:
        """Transitive closure over produced links, in breadth-first order."""
        self._entity(address)
        seen: set[str] = set()
        order: list[str] = []
        frontier = [address]
        while frontier:
            current = frontier.pop(0)
            for child in self._entity(current).get("produced", []):
                if child not in seen:
                    seen.add(child)
                    order.append(child)
                    frontier.append(child)
        listing = []
        for descendant in order:
            entity = self._entity(descendant)
            listing.append(
                {
                    "address": descendant,
                    "kind_id": entity["kind_id"],
                    "entity_class": entity["class"],
                    "status": entity["status"],
                    "quantity": entity["quantity"],
                    "unit": entity["unit"],
                }
            )
        return listing

    def qr_payload(self, address: str) -> QrPayload:
        entity = self._entity(address)
        if entity["class"] != "P":
            raise TraceQueryError("QR payloads identify final products, not resources")
        return QrPayload(chain_id=self.chain.chain_id, address=address)


def _render_text(node: TraceNode, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    lines.append(
        f"{pad}- {node.kind_name} [{node.entity_class}] {node.address} "
        f"({node.quantity} {node.unit}, {node.status}, {node.company})"
    )
    for event in node.events:
        parts = ", ".join(f"{name}={value}" for name, _type, value in event.parameters)
        suffix = f" | {parts}" if parts else ""
        lines.append(
            f"{pad}    * {event.event_kind_id} by {event.registrant[:8]} "
            f"@ block {event.block_height}"
            f" (asseverations: {event.asseveration_count}){suffix}"
        )
    for child in node.children:
        _render_text(child, indent + 1, lines)


def render_trace(node: TraceNode, fmt: str = "json") -> str:
    """Serialize a trace tree deterministically (``json`` or ``text``)."""
    import json as _json

    if fmt == "json":
        return _json.dumps(node.to_doc(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if fmt == "text":
        lines: list[str] = []
        _render_text(node, 0, lines)
        return "\n".join(lines) + "\n"
    raise TraceQueryError(f"unknown trace format {fmt!r}")

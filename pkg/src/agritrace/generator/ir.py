"""Contract-definition IR derived from a supply-chain configuration.

The IR mirrors the runtime contract model -- Producer, AbstractResource,
ProductiveResource, AgriProduct plus the AgriEvent record shape --
specialized to the configured kinds and events: one recording method and
one log-event signature per configured event kind, each annotated with
the actor ids authorized to call it.  Generation is deterministic, so
identical configs produce identical IRs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..config.model import CERTIFIER_ROLES, EventKindDef, SupplyChainConfig


def pascal_case(identifier: str) -> str:
    return "".join(part.capitalize() for part in identifier.replace("-", "_").split("_") if part)


@dataclass(frozen=True)
class StateField:
    name: str
    field_type: str
    comment: str = ""


@dataclass(frozen=True)
class LogEventSig:
    """One emitted log event, carrying the encoded parameter payload."""

    name: str
    event_kind_id: str
    params: tuple[tuple[str, str], ...]
    param_specs: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class MethodSig:
    name: str
    params: tuple[tuple[str, str], ...]
    authorized_actor_ids: tuple[str, ...]
    emits: str | None = None
    event_kind_id: str | None = None
    event_class: str | None = None
    comment: str = ""


@dataclass(frozen=True)
class ContractDef:
    name: str
    base: str | None
    comment: str
    state_fields: tuple[StateField, ...] = ()
    methods: tuple[MethodSig, ...] = ()
    log_events: tuple[LogEventSig, ...] = ()
    is_abstract: bool = False


@dataclass(frozen=True)
class ContractIR:
    contracts: tuple[ContractDef, ...]
    record_shapes: tuple[ContractDef, ...] = ()

    def log_event_signatures(self) -> list[LogEventSig]:
        found: list[LogEventSig] = []
        for contract in self.contracts:
            found.extend(contract.log_events)
        return found

    def to_doc(self) -> dict:
        def contract_doc(contract: ContractDef) -> dict:
            return {
                "name": contract.name,
                "base": contract.base,
                "comment": contract.comment,
                "is_abstract": contract.is_abstract,
                "state_fields": [
                    {"name": f.name, "type": f.field_type, "comment": f.comment}
                    for f in contract.state_fields
                ],
                "methods": [
                    {
                        "name": m.name,
                        "params": [list(p) for p in m.params],
                        "authorized_actor_ids": list(m.authorized_actor_ids),
                        "emits": m.emits,
                        "event_kind_id": m.event_kind_id,
                        "event_class": m.event_class,
                        "comment": m.comment,
                    }
                    for m in contract.methods
                ],
                "log_events": [
                    {
                        "name": e.name,
                        "event_kind_id": e.event_kind_id,
                        "params": [list(p) for p in e.params],
                        "param_specs": [list(p) for p in e.param_specs],
                    }
                    for e in contract.log_events
                ],
            }

        return {
            "contracts": [contract_doc(c) for c in self.contracts],
            "record_shapes": [contract_doc(c) for c in self.record_shapes],
        }


def _log_sig(event: EventKindDef) -> LogEventSig:
    return LogEventSig(
        name=f"{pascal_case(event.id)}Recorded",
        event_kind_id=event.id,
        params=(("entity", "address"), ("registrant", "address"), ("parameters", "bytes")),
        param_specs=tuple((spec.name, spec.param_type) for spec in event.param_specs),
    )


def _sorted_union(*id_lists) -> tuple[str, ...]:
    union: set[str] = set()
    for ids in id_lists:
        union.update(ids)
    return tuple(sorted(union))


def generate_contract_ir(config: SupplyChainConfig) -> ContractIR:
    admins = tuple(sorted(a.id for a in config.administrators()))
    certifiers = tuple(sorted(a.id for a in config.actors.values() if a.role in CERTIFIER_ROLES))
    resource_creator_ids = _sorted_union(
        *(k.authorized_actor_ids for k in config.resource_kinds())
    )
    product_handler_ids = _sorted_union(
        *(k.authorized_actor_ids for k in config.product_kinds())
    )
    entity_handler_ids = _sorted_union(resource_creator_ids, product_handler_ids)

    d_events = [e for e in config.event_kinds.values() if e.event_class == "D"]
    t_events = [e for e in config.event_kinds.values() if e.event_class == "T"]

    producer = ContractDef(
        name="Producer",
        base=None,
        comment="One contract per company; indexes every owned resource and product.",
        state_fields=(
            StateField("catalog", "address", "address catalog consulted for authorization"),
            StateField("companyName", "string"),
            StateField("owned", "mapping(address => bool)", "all related resources and products"),
        ),
        methods=(
            MethodSig(
                name="createResource",
                params=(
                    ("kindId", "string"),
                    ("description", "string"),
                    ("size", "uint256"),
                    ("unit", "string"),
                ),
                authorized_actor_ids=resource_creator_ids,
                comment="Deploys a ProductiveResource and links it into owned.",
            ),
            MethodSig(
                name="addOwned",
                params=(("entity", "address"),),
                authorized_actor_ids=admins,
                comment="System linkage when transformations deploy new products.",
            ),
        ),
    )

    abstract_methods: list[MethodSig] = [
        MethodSig(
            name=f"record{pascal_case(event.id)}",
            params=(("parameters", "bytes"),),
            authorized_actor_ids=tuple(event.authorized_actor_ids),
            emits=f"{pascal_case(event.id)}Recorded",
            event_kind_id=event.id,
            event_class="D",
            comment=f"Documentation event '{event.name}'; payload goes to the event log.",
        )
        for event in d_events
    ]
    abstract_methods.append(
        MethodSig(
            name="notarize",
            params=(("digest", "bytes32"), ("locator", "string"), ("metadata", "bytes")),
            authorized_actor_ids=entity_handler_ids,
            comment="Anchors an off-chain document digest with its retrieval locator.",
        )
    )
    abstract_methods.append(
        MethodSig(
            name="asseverate",
            params=(("eventIndex", "uint256"),),
            authorized_actor_ids=certifiers,
            comment="Third-party certification of a recorded event.",
        )
    )

    abstract_resource = ContractDef(
        name="AbstractResource",
        base=None,
        comment="Shared shape of productive resources and products.",
        is_abstract=True,
        state_fields=(
            StateField("catalog", "address", "address catalog consulted for authorization"),
            StateField("kindId", "string"),
            StateField("producer", "address"),
            StateField("active", "bool"),
            StateField("produced", "address[]", "downstream products; append-only"),
            StateField("events", "AgriEvent[]", "metadata only; payloads live in the event log"),
        ),
        methods=tuple(abstract_methods),
        log_events=tuple(_log_sig(event) for event in d_events),
    )

    productive_resource = ContractDef(
        name="ProductiveResource",
        base="AbstractResource",
        comment="A primary source (field, grove, herd); has no origins.",
        state_fields=(
            StateField("description", "string"),
            StateField("size", "uint256"),
            StateField("unit", "string"),
        ),
    )

    product_methods: list[MethodSig] = [
        MethodSig(
            name=f"transform{pascal_case(event.id)}",
            params=(
                ("inputs", "address[]"),
                ("outputKinds", "string[]"),
                ("outputQuantities", "uint256[]"),
                ("parameters", "bytes"),
            ),
            authorized_actor_ids=tuple(event.authorized_actor_ids),
            emits=f"{pascal_case(event.id)}Recorded",
            event_kind_id=event.id,
            event_class="T",
            comment=(
                f"Transformation '{event.name}': burns input tokens, mints outputs "
                f"bounded by yield {event.max_yield}."
            ),
        )
        for event in t_events
    ]
    product_methods.append(
        MethodSig(
            name="split",
            params=(("parts", "uint256[]"),),
            authorized_actor_ids=product_handler_ids,
            comment="Divides the lot into parts of the same kind; token total preserved.",
        )
    )
    product_methods.append(
        MethodSig(
            name="merge",
            params=(("others", "address[]"), ("outputs", "uint256[]")),
            authorized_actor_ids=product_handler_ids,
            comment="Merges lots of one kind; token total preserved.",
        )
    )

    agri_product = ContractDef(
        name="AgriProduct",
        base="AbstractResource",
        comment="A production lot; origins are frozen at creation.",
        state_fields=(
            StateField("origins", "address[]", "upstream entities; immutable after creation"),
            StateField("quantity", "uint256", "base units; changes only via split/merge/transform"),
            StateField("unit", "string"),
            StateField("tokenHolder", "address"),
        ),
        methods=tuple(product_methods),
        log_events=tuple(_log_sig(event) for event in t_events),
    )

    agri_event = ContractDef(
        name="AgriEvent",
        base=None,
        comment="Record shape of one documentation or transformation event.",
        state_fields=(
            StateField("eventKindId", "string"),
            StateField("eventClass", "uint8", "0 = documentation, 1 = transformation"),
            StateField("registrant", "address"),
            StateField("blockHeight", "uint256"),
            StateField("txRef", "bytes32"),
            StateField("paramsDigest", "bytes32", "digest of the logged parameter payload"),
            StateField("asseverations", "Asseveration[]"),
        ),
    )

    return ContractIR(
        contracts=(producer, abstract_resource, productive_resource, agri_product),
        record_shapes=(agri_event,),
    )

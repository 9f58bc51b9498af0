"""In-memory model of a supply-chain configuration.

A configuration is described by five JSON files, each wrapped in a
``{"kind": ..., "version": ..., "items": [...]}`` envelope:

* ``actors`` -- people, bodies and devices allowed to transact;
* ``companies`` -- firms, the kinds they manage and the actors they trust;
* ``kinds`` -- productive-resource (R) and product (P) kinds;
* ``event_kinds`` -- documentation (D) and transformation (T) events with
  their typed parameters;
* ``activities`` -- per-company/per-actor menu customization for clients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

ROLES = (
    "administrator",
    "producer",
    "supplier",
    "transformer",
    "wholesaler",
    "retailer",
    "certification_authority",
    "professional",
    "analysis_lab",
    "warehouse",
    "device",
)

CERTIFIER_ROLES = ("certification_authority", "professional", "analysis_lab")

PARAM_TYPES = (
    "int",
    "float",
    "string",
    "text",
    "enum",
    "link",
    "hashlink",
    "upload",
    "hashupload",
)

KIND_CLASSES = ("R", "P")
EVENT_CLASSES = ("D", "T")

DESCRIPTOR_KINDS = ("actors", "companies", "kinds", "event_kinds", "activities")

# Event ids claimed by built-in ledger operations; configs may not reuse them.
RESERVED_EVENT_KIND_IDS = ("split", "merge", "notarization")


@dataclass(frozen=True)
class ActorDef:
    id: str
    name: str
    role: str


@dataclass(frozen=True)
class CompanyDef:
    name: str
    resource_ids: tuple[str, ...]
    authorized_actor_ids: tuple[str, ...]


@dataclass(frozen=True)
class KindDef:
    """A productive-resource (``R``) or product (``P``) kind."""

    id: str
    kind_class: str
    name: str
    authorized_actor_ids: tuple[str, ...]
    description: str | None = None
    default_unit: str | None = None


@dataclass(frozen=True)
class ParamSpec:
    name: str
    param_type: str
    enum_options: tuple[str, ...] = ()


@dataclass(frozen=True)
class EventKindDef:
    """One documentation or transformation event kind.

    ``max_yield`` bounds transformation output: at most ``max_yield``
    output base-units may be minted per input base-unit.  It is kept as
    an exact rational so conservation checks never see rounding.
    """

    id: str
    name: str
    event_class: str
    applicable_kind_ids: tuple[str, ...]
    authorized_actor_ids: tuple[str, ...]
    generated_kind_ids: tuple[str, ...] = ()
    param_specs: tuple[ParamSpec, ...] = ()
    max_yield: Fraction = Fraction(1)
    required_unlock_actor_ids: tuple[str, ...] = ()

    def param_spec(self, name: str) -> ParamSpec | None:
        for spec in self.param_specs:
            if spec.name == name:
                return spec
        return None


@dataclass(frozen=True)
class ActivityDef:
    company_name: str
    visible_event_kind_ids: tuple[str, ...]
    actor_id: str | None = None


@dataclass(frozen=True)
class SupplyChainConfig:
    """Validated, cross-checked view of the five descriptor collections."""

    actors: dict[str, ActorDef]
    companies: dict[str, CompanyDef]
    kinds: dict[str, KindDef]
    event_kinds: dict[str, EventKindDef]
    activities: tuple[ActivityDef, ...]
    version: int = 1

    def administrators(self) -> list[ActorDef]:
        return [a for a in self.actors.values() if a.role == "administrator"]

    def resource_kinds(self) -> list[KindDef]:
        return [k for k in self.kinds.values() if k.kind_class == "R"]

    def product_kinds(self) -> list[KindDef]:
        return [k for k in self.kinds.values() if k.kind_class == "P"]

    def visible_event_kinds(self, company_name: str | None, actor_id: str | None) -> list[str]:
        """Event kinds the activities file exposes for a company/actor pair.

        An activity row matches when its company matches (if the caller
        scopes by company) and its actor is unset or equal to the
        caller's.  With no matching rows every configured event is
        visible; the activities file narrows, it does not grant.
        """
        matched: list[str] = []
        saw_row = False
        for activity in self.activities:
            if company_name is not None and activity.company_name != company_name:
                continue
            if activity.actor_id is not None and activity.actor_id != actor_id:
                continue
            saw_row = True
            for event_id in activity.visible_event_kind_ids:
                if event_id not in matched:
                    matched.append(event_id)
        if not saw_row:
            return list(self.event_kinds)
        return matched


@dataclass(frozen=True)
class DescriptorCollection:
    """One parsed descriptor file, before cross-file validation."""

    kind: str
    version: int
    items: tuple = field(default_factory=tuple)

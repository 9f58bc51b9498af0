"""Cross-reference validation of parsed descriptor collections.

Collects *every* violation rather than stopping at the first, in a
deterministic order: files in their fixed order (actors, companies,
kinds, event_kinds, activities), then item index, then check order.
Collection-level findings (such as a missing administrator) are
reported with item index -1.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigValidationError
from .model import (
    DESCRIPTOR_KINDS,
    DescriptorCollection,
    EVENT_CLASSES,
    KIND_CLASSES,
    PARAM_TYPES,
    RESERVED_EVENT_KIND_IDS,
    ROLES,
    SupplyChainConfig,
)

_FILE_RANK = {kind: rank for rank, kind in enumerate(DESCRIPTOR_KINDS)}


@dataclass(frozen=True)
class Violation:
    file: str
    item_index: int
    item_id: str
    message: str

    def __str__(self) -> str:
        where = f"{self.file}[{self.item_index}]" if self.item_index >= 0 else self.file
        if self.item_id:
            where += f" ({self.item_id})"
        return f"{where}: {self.message}"


def collect_violations(collections: dict[str, DescriptorCollection]) -> list[Violation]:
    violations: list[Violation] = []

    def add(file: str, index: int, item_id: str, message: str) -> None:
        violations.append(Violation(file, index, item_id, message))

    versions = {kind: collections[kind].version for kind in DESCRIPTOR_KINDS}
    base_version = versions["actors"]

    actors = collections["actors"].items
    companies = collections["companies"].items
    kinds = collections["kinds"].items
    event_kinds = collections["event_kinds"].items
    activities = collections["activities"].items

    actor_ids = {a.id for a in actors}
    kind_ids = {k.id for k in kinds}
    event_ids = {e.id for e in event_kinds}
    company_names = {c.name for c in companies}

    # actors
    seen: set[str] = set()
    for index, actor in enumerate(actors):
        if not actor.id:
            add("actors", index, "", "actor id must not be empty")
        if actor.id in seen:
            add("actors", index, actor.id, f"duplicate actor id {actor.id!r}")
        seen.add(actor.id)
        if actor.role not in ROLES:
            add("actors", index, actor.id, f"unknown role {actor.role!r}")
    if not any(a.role == "administrator" for a in actors):
        add("actors", -1, "", "configuration must define at least one administrator actor")

    # companies
    seen = set()
    for index, company in enumerate(companies):
        if not company.name:
            add("companies", index, "", "company name must not be empty")
        if company.name in seen:
            add("companies", index, company.name, f"duplicate company name {company.name!r}")
        seen.add(company.name)
        if not company.resource_ids:
            add("companies", index, company.name, "company must manage at least one kind")
        if not company.authorized_actor_ids:
            add("companies", index, company.name, "company must authorize at least one actor")
        for ref in company.resource_ids:
            if ref not in kind_ids:
                add(
                    "companies",
                    index,
                    company.name,
                    f"company {company.name!r} references unknown kind {ref!r}",
                )
        for ref in company.authorized_actor_ids:
            if ref not in actor_ids:
                add(
                    "companies",
                    index,
                    company.name,
                    f"company {company.name!r} references unknown actor {ref!r}",
                )

    # kinds
    seen = set()
    for index, kind in enumerate(kinds):
        if not kind.id:
            add("kinds", index, "", "kind id must not be empty")
        if kind.id in seen:
            add("kinds", index, kind.id, f"duplicate kind id {kind.id!r}")
        seen.add(kind.id)
        if kind.kind_class not in KIND_CLASSES:
            add("kinds", index, kind.id, f"kind class must be R or P, got {kind.kind_class!r}")
        for ref in kind.authorized_actor_ids:
            if ref not in actor_ids:
                add("kinds", index, kind.id, f"kind {kind.id!r} references unknown actor {ref!r}")

    # event kinds
    seen = set()
    for index, event in enumerate(event_kinds):
        if not event.id:
            add("event_kinds", index, "", "event id must not be empty")
        if event.id in seen:
            add("event_kinds", index, event.id, f"duplicate event id {event.id!r}")
        seen.add(event.id)
        if event.id in RESERVED_EVENT_KIND_IDS:
            add(
                "event_kinds",
                index,
                event.id,
                f"event id {event.id!r} is reserved for a built-in operation",
            )
        if event.event_class not in EVENT_CLASSES:
            add(
                "event_kinds",
                index,
                event.id,
                f"event class must be D or T, got {event.event_class!r}",
            )
        for ref in event.applicable_kind_ids:
            if ref not in kind_ids:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"event {event.id!r} references unknown kind {ref!r}",
                )
        for ref in event.authorized_actor_ids:
            if ref not in actor_ids:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"event {event.id!r} references unknown actor {ref!r}",
                )
        for ref in event.generated_kind_ids:
            if ref not in kind_ids:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"event {event.id!r} references unknown generated kind {ref!r}",
                )
        if event.event_class == "D":
            if event.generated_kind_ids:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"documentation event {event.id!r} must not declare generated kinds",
                )
            if event.max_yield != 1:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"documentation event {event.id!r} must not declare max_yield",
                )
            if event.required_unlock_actor_ids:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"documentation event {event.id!r} must not declare unlock approvers",
                )
        if event.max_yield < 0:
            add("event_kinds", index, event.id, "max_yield must be non-negative")
        for ref in event.required_unlock_actor_ids:
            if ref not in actor_ids:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"event {event.id!r} references unknown unlock actor {ref!r}",
                )
        param_names: set[str] = set()
        for spec in event.param_specs:
            if not spec.name:
                add("event_kinds", index, event.id, "parameter name must not be empty")
            if spec.name in param_names:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"duplicate parameter name {spec.name!r} in event {event.id!r}",
                )
            param_names.add(spec.name)
            if spec.param_type not in PARAM_TYPES:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"parameter {spec.name!r} has unknown type {spec.param_type!r}",
                )
            if spec.param_type == "enum" and not spec.enum_options:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"enum parameter {spec.name!r} must list its options",
                )
            if spec.param_type != "enum" and spec.enum_options:
                add(
                    "event_kinds",
                    index,
                    event.id,
                    f"parameter {spec.name!r} is not an enum but lists options",
                )

    # activities
    for index, activity in enumerate(activities):
        if activity.company_name not in company_names:
            add(
                "activities",
                index,
                activity.company_name,
                f"activity references unknown company {activity.company_name!r}",
            )
        if activity.actor_id is not None and activity.actor_id not in actor_ids:
            add(
                "activities",
                index,
                activity.company_name,
                f"activity references unknown actor {activity.actor_id!r}",
            )
        for ref in activity.visible_event_kind_ids:
            if ref not in event_ids:
                add(
                    "activities",
                    index,
                    activity.company_name,
                    f"activity references unknown event {ref!r}",
                )

    # envelope versions must agree, otherwise the canonical output could
    # not reproduce the inputs
    for kind in DESCRIPTOR_KINDS:
        if versions[kind] != base_version:
            add(kind, -1, "", f"descriptor version {versions[kind]} disagrees with actors file")

    violations.sort(key=lambda v: (_FILE_RANK[v.file] if v.file in _FILE_RANK else 99, v.item_index))
    return violations


def validate_config(collections: dict[str, DescriptorCollection]) -> SupplyChainConfig:
    """Cross-check the five collections and assemble the config.

    Raises :class:`ConfigValidationError` with the complete, ordered
    violation list when any rule fails.
    """
    missing = [kind for kind in DESCRIPTOR_KINDS if kind not in collections]
    if missing:
        raise ConfigValidationError(
            [Violation(kind, -1, "", "descriptor collection missing") for kind in missing]
        )
    violations = collect_violations(collections)
    if violations:
        raise ConfigValidationError(violations)
    return SupplyChainConfig(
        actors={a.id: a for a in collections["actors"].items},
        companies={c.name: c for c in collections["companies"].items},
        kinds={k.id: k for k in collections["kinds"].items},
        event_kinds={e.id: e for e in collections["event_kinds"].items},
        activities=tuple(collections["activities"].items),
        version=collections["actors"].version,
    )

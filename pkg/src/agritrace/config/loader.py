"""Reading and writing the five descriptor files.

Each file is an envelope ``{"kind": <descriptor kind>, "version": <int>,
"items": [...]}``.  Parsing is strict about structure (field names and
JSON types) but leaves value-level rules -- closed sets, cross
references, class constraints -- to :func:`agritrace.config.validate.validate_config`,
which reports them all at once.

Serialization emits a canonical form: fixed field order, two-space
indent, ``\\n`` line endings, optional fields omitted when unset.
``parse -> serialize`` is the identity on canonical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from ..errors import DescriptorParseError, UnsupportedDescriptorError
from .model import (
    ActivityDef,
    ActorDef,
    CompanyDef,
    DESCRIPTOR_KINDS,
    DescriptorCollection,
    EventKindDef,
    KindDef,
    ParamSpec,
    SupplyChainConfig,
)

DESCRIPTOR_FILENAMES = {kind: f"{kind}.json" for kind in DESCRIPTOR_KINDS}


def _require(item: dict, field: str, types, where: str):
    if field not in item:
        raise DescriptorParseError(f"{where}: missing field {field!r}")
    value = item[field]
    if not isinstance(value, types):
        raise DescriptorParseError(f"{where}: field {field!r} has wrong type")
    return value


def _optional(item: dict, field: str, types, where: str):
    if field not in item or item[field] is None:
        return None
    value = item[field]
    if not isinstance(value, types):
        raise DescriptorParseError(f"{where}: field {field!r} has wrong type")
    return value


def _string_list(value: Any, where: str, field: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise DescriptorParseError(f"{where}: field {field!r} must be a list of strings")
    return tuple(value)


def _reject_unknown(item: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(item) - allowed)
    if unknown:
        raise DescriptorParseError(f"{where}: unknown field(s) {', '.join(unknown)}")


def _parse_yield(value: Any, where: str) -> Fraction:
    # Accepts "1/5", "0.2", 1 or 0.2; decimals go through their shortest
    # string form so 0.2 means exactly 1/5.
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            return Fraction(str(value))
        if isinstance(value, str):
            return Fraction(value)
    except (ValueError, ZeroDivisionError):
        pass
    raise DescriptorParseError(f"{where}: max_yield is not a valid rational")


def _parse_actor(item: dict, where: str) -> ActorDef:
    _reject_unknown(item, {"id", "name", "role"}, where)
    return ActorDef(
        id=_require(item, "id", str, where),
        name=_require(item, "name", str, where),
        role=_require(item, "role", str, where),
    )


def _parse_company(item: dict, where: str) -> CompanyDef:
    _reject_unknown(item, {"name", "resources", "authorized_actors"}, where)
    return CompanyDef(
        name=_require(item, "name", str, where),
        resource_ids=_string_list(_require(item, "resources", list, where), where, "resources"),
        authorized_actor_ids=_string_list(
            _require(item, "authorized_actors", list, where), where, "authorized_actors"
        ),
    )


def _parse_kind(item: dict, where: str) -> KindDef:
    _reject_unknown(item, {"id", "class", "name", "authorized_actors", "description", "unit"}, where)
    return KindDef(
        id=_require(item, "id", str, where),
        kind_class=_require(item, "class", str, where),
        name=_require(item, "name", str, where),
        authorized_actor_ids=_string_list(
            _require(item, "authorized_actors", list, where), where, "authorized_actors"
        ),
        description=_optional(item, "description", str, where),
        default_unit=_optional(item, "unit", str, where),
    )


def _parse_param_spec(item: Any, where: str) -> ParamSpec:
    if not isinstance(item, dict):
        raise DescriptorParseError(f"{where}: parameter entries must be objects")
    _reject_unknown(item, {"name", "type", "options"}, where)
    options = _optional(item, "options", list, where)
    return ParamSpec(
        name=_require(item, "name", str, where),
        param_type=_require(item, "type", str, where),
        enum_options=_string_list(options, where, "options") if options is not None else (),
    )


def _parse_event_kind(item: dict, where: str) -> EventKindDef:
    _reject_unknown(
        item,
        {
            "id",
            "name",
            "class",
            "applies_to",
            "authorized_actors",
            "generates",
            "parameters",
            "max_yield",
            "unlock_actors",
        },
        where,
    )
    generates = _optional(item, "generates", list, where)
    parameters = _optional(item, "parameters", list, where)
    unlock = _optional(item, "unlock_actors", list, where)
    max_yield = item.get("max_yield")
    return EventKindDef(
        id=_require(item, "id", str, where),
        name=_require(item, "name", str, where),
        event_class=_require(item, "class", str, where),
        applicable_kind_ids=_string_list(
            _require(item, "applies_to", list, where), where, "applies_to"
        ),
        authorized_actor_ids=_string_list(
            _require(item, "authorized_actors", list, where), where, "authorized_actors"
        ),
        generated_kind_ids=_string_list(generates, where, "generates") if generates else (),
        param_specs=tuple(_parse_param_spec(p, where) for p in (parameters or [])),
        max_yield=_parse_yield(max_yield, where) if max_yield is not None else Fraction(1),
        required_unlock_actor_ids=_string_list(unlock, where, "unlock_actors") if unlock else (),
    )


def _parse_activity(item: dict, where: str) -> ActivityDef:
    _reject_unknown(item, {"company", "actor", "visible_events"}, where)
    return ActivityDef(
        company_name=_require(item, "company", str, where),
        actor_id=_optional(item, "actor", str, where),
        visible_event_kind_ids=_string_list(
            _require(item, "visible_events", list, where), where, "visible_events"
        ),
    )


_ITEM_PARSERS = {
    "actors": _parse_actor,
    "companies": _parse_company,
    "kinds": _parse_kind,
    "event_kinds": _parse_event_kind,
    "activities": _parse_activity,
}


def parse_descriptor(raw: bytes) -> DescriptorCollection:
    """Parse one descriptor file into its typed collection.

    Raises :class:`DescriptorParseError` (with line/column for syntax
    errors) or :class:`UnsupportedDescriptorError` for envelope kinds
    outside the five supported ones.
    """
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DescriptorParseError(f"descriptor is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptorParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    if not isinstance(doc, dict):
        raise DescriptorParseError("descriptor must be a JSON object")
    _reject_unknown(doc, {"kind", "version", "items"}, "envelope")
    kind = doc.get("kind")
    if not isinstance(kind, str):
        raise DescriptorParseError("envelope: missing or non-string 'kind'")
    if kind not in DESCRIPTOR_KINDS:
        raise UnsupportedDescriptorError(f"unsupported descriptor kind {kind!r}")
    version = doc.get("version")
    if not isinstance(version, int) or isinstance(version, bool):
        raise DescriptorParseError("envelope: missing or non-integer 'version'")
    items = doc.get("items")
    if not isinstance(items, list):
        raise DescriptorParseError("envelope: 'items' must be a list")
    parser = _ITEM_PARSERS[kind]
    parsed = []
    for index, item in enumerate(items):
        where = f"{kind}[{index}]"
        if not isinstance(item, dict):
            raise DescriptorParseError(f"{where}: item must be an object")
        parsed.append(parser(item, where))
    return DescriptorCollection(kind=kind, version=version, items=tuple(parsed))


# --- canonical output -------------------------------------------------------


def _yield_doc(value: Fraction) -> str:
    return str(value)


def _actor_doc(actor: ActorDef) -> dict:
    return {"id": actor.id, "name": actor.name, "role": actor.role}


def _company_doc(company: CompanyDef) -> dict:
    return {
        "name": company.name,
        "resources": list(company.resource_ids),
        "authorized_actors": list(company.authorized_actor_ids),
    }


def _kind_doc(kind: KindDef) -> dict:
    doc: dict[str, Any] = {
        "id": kind.id,
        "class": kind.kind_class,
        "name": kind.name,
        "authorized_actors": list(kind.authorized_actor_ids),
    }
    if kind.description is not None:
        doc["description"] = kind.description
    if kind.default_unit is not None:
        doc["unit"] = kind.default_unit
    return doc


def _param_doc(spec: ParamSpec) -> dict:
    doc: dict[str, Any] = {"name": spec.name, "type": spec.param_type}
    if spec.enum_options:
        doc["options"] = list(spec.enum_options)
    return doc


def _event_kind_doc(event: EventKindDef) -> dict:
    doc: dict[str, Any] = {
        "id": event.id,
        "name": event.name,
        "class": event.event_class,
        "applies_to": list(event.applicable_kind_ids),
        "authorized_actors": list(event.authorized_actor_ids),
    }
    if event.generated_kind_ids:
        doc["generates"] = list(event.generated_kind_ids)
    if event.param_specs:
        doc["parameters"] = [_param_doc(p) for p in event.param_specs]
    if event.event_class == "T":
        doc["max_yield"] = _yield_doc(event.max_yield)
    if event.required_unlock_actor_ids:
        doc["unlock_actors"] = list(event.required_unlock_actor_ids)
    return doc


def _activity_doc(activity: ActivityDef) -> dict:
    doc: dict[str, Any] = {"company": activity.company_name}
    if activity.actor_id is not None:
        doc["actor"] = activity.actor_id
    doc["visible_events"] = list(activity.visible_event_kind_ids)
    return doc


def serialize_config(config: SupplyChainConfig) -> dict[str, dict]:
    """Render a config back to its five envelope documents."""
    return {
        "actors": {
            "kind": "actors",
            "version": config.version,
            "items": [_actor_doc(a) for a in config.actors.values()],
        },
        "companies": {
            "kind": "companies",
            "version": config.version,
            "items": [_company_doc(c) for c in config.companies.values()],
        },
        "kinds": {
            "kind": "kinds",
            "version": config.version,
            "items": [_kind_doc(k) for k in config.kinds.values()],
        },
        "event_kinds": {
            "kind": "event_kinds",
            "version": config.version,
            "items": [_event_kind_doc(e) for e in config.event_kinds.values()],
        },
        "activities": {
            "kind": "activities",
            "version": config.version,
            "items": [_activity_doc(a) for a in config.activities],
        },
    }


def descriptor_bytes(doc: dict) -> bytes:
    """Canonical on-disk form of one envelope document."""
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def load_descriptor_file(path: Path) -> DescriptorCollection:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DescriptorParseError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_descriptor(raw)
    except DescriptorParseError as exc:
        raise DescriptorParseError(f"{path.name}: {exc.message}", exc.line, exc.column) from exc


def load_config_dir(directory: str | Path) -> SupplyChainConfig:
    """Load and fully validate the five descriptor files in ``directory``."""
    from .validate import validate_config

    directory = Path(directory)
    collections = {}
    for kind, filename in DESCRIPTOR_FILENAMES.items():
        collection = load_descriptor_file(directory / filename)
        if collection.kind != kind:
            raise DescriptorParseError(
                f"{filename}: envelope kind {collection.kind!r} does not match file name"
            )
        collections[kind] = collection
    return validate_config(collections)


def write_config_dir(config: SupplyChainConfig, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for kind, doc in serialize_config(config).items():
        (directory / DESCRIPTOR_FILENAMES[kind]).write_bytes(descriptor_bytes(doc))

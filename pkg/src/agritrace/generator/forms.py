"""Per-event UI form schemas.

Each configured event kind yields exactly one schema: one field per
declared parameter, in declaration order, with a widget class derived
1:1 from the parameter type and a validation rule the client enforces
before submitting.  Adding an event kind to the configuration requires
no UI change -- clients render purely from these documents.

:func:`validate_form_values` is the client-side rule interpreter.  It is
deliberately written against the schema document (not the engine's
parameter code), so tests can check that both routes accept exactly the
same inputs.
"""

from __future__ import annotations

import re
from urllib.parse import urlsplit

from ..config.model import SupplyChainConfig
from ..errors import TraceQueryError

WIDGET_BY_PARAM_TYPE = {
    "int": "integer-input",
    "float": "decimal-input",
    "string": "text-input",
    "text": "textarea",
    "enum": "select",
    "link": "url-input",
    "hashlink": "url-digest-input",
    "upload": "file-upload",
    "hashupload": "hashed-file-upload",
}

_VALIDATION_BY_PARAM_TYPE = {
    "int": "integer",
    "float": "decimal",
    "string": "single-line",
    "text": "multi-line",
    "enum": "one-of",
    "link": "uri",
    "hashlink": "uri-digest",
    "upload": "content-id",
    "hashupload": "content-id",
}

_INTEGER_RE = re.compile(r"-?[0-9]+")
_CONTENT_ID_RE = re.compile(r"[0-9a-f]{64}")
US = "\x1f"


def generate_form_schema(config: SupplyChainConfig, event_kind_id: str) -> dict:
    """Build the form schema document for one event kind."""
    event = config.event_kinds.get(event_kind_id)
    if event is None:
        raise TraceQueryError(f"unknown event kind {event_kind_id!r}")
    fields = []
    for spec in event.param_specs:
        rule: dict = {"kind": _VALIDATION_BY_PARAM_TYPE[spec.param_type]}
        if spec.param_type == "enum":
            rule["options"] = list(spec.enum_options)
        fields.append(
            {
                "name": spec.name,
                "param_type": spec.param_type,
                "widget": WIDGET_BY_PARAM_TYPE[spec.param_type],
                "validation": rule,
                "required": True,
                "upload": spec.param_type in ("upload", "hashupload"),
                "hash": spec.param_type in ("hashupload", "hashlink"),
            }
        )
    return {
        "event_kind_id": event.id,
        "title": event.name,
        "event_class": event.event_class,
        "target_kind_ids": list(event.applicable_kind_ids),
        "generated_kind_ids": list(event.generated_kind_ids),
        "authorized_actor_ids": list(event.authorized_actor_ids),
        "requires_unlock": bool(event.required_unlock_actor_ids),
        "max_yield": str(event.max_yield) if event.event_class == "T" else None,
        "fields": fields,
    }


def generate_all_form_schemas(config: SupplyChainConfig) -> list[dict]:
    return [generate_form_schema(config, event_id) for event_id in config.event_kinds]


def form_schema_doc(schemas: list[dict]) -> dict:
    """Envelope written to disk and served to clients."""
    return {"kind": "form_schemas", "version": 1, "items": schemas}


def _check_rule(rule: dict, value: object) -> str | None:
    """Return an error string for ``value`` under ``rule``, or None."""
    kind = rule["kind"]
    if isinstance(value, bool):
        return "booleans are not accepted"
    if kind == "integer":
        if isinstance(value, int):
            return None
        if isinstance(value, str) and _INTEGER_RE.fullmatch(value):
            return None
        return "must be an integer"
    if kind == "decimal":
        if isinstance(value, (int, float)):
            number = float(value)
        elif isinstance(value, str):
            try:
                number = float(value)
            except ValueError:
                return "must be a decimal number"
        else:
            return "must be a decimal number"
        if number != number or number in (float("inf"), float("-inf")):
            return "must be finite"
        return None
    if kind == "single-line":
        if not isinstance(value, str):
            return "must be text"
        if "\n" in value or "\r" in value:
            return "must be a single line"
        return None
    if kind == "multi-line":
        return None if isinstance(value, str) else "must be text"
    if kind == "one-of":
        if not isinstance(value, str) or value not in rule["options"]:
            return f"must be one of {rule['options']}"
        return None
    if kind == "uri":
        if not isinstance(value, str):
            return "must be a URI"
        try:
            parts = urlsplit(value)
        except ValueError:
            return "must be a URI with a scheme"
        if not parts.scheme or not (parts.netloc or parts.path):
            return "must be a URI with a scheme"
        return None
    if kind == "uri-digest":
        if isinstance(value, (list, tuple)) and len(value) == 2:
            uri, digest = value
        elif isinstance(value, str) and value.count(US) == 1:
            uri, digest = value.split(US)
        else:
            return "must be a URI plus digest pair"
        if not isinstance(uri, str):
            return "URI part must be text"
        try:
            parts = urlsplit(uri)
        except ValueError:
            return "URI part must have a scheme"
        if not parts.scheme or not (parts.netloc or parts.path):
            return "URI part must have a scheme"
        if not isinstance(digest, str) or not _CONTENT_ID_RE.fullmatch(digest):
            return "digest part must be 64 hex characters"
        return None
    if kind == "content-id":
        if not isinstance(value, str) or not _CONTENT_ID_RE.fullmatch(value):
            return "must be a content id (64 hex characters)"
        return None
    return f"unknown validation rule {kind!r}"


def validate_form_values(schema: dict, values: dict) -> dict[str, str]:
    """Validate submitted values against a schema document.

    Returns ``field name -> error`` for every failing field; an empty
    mapping means the submission is acceptable.  Unknown and missing
    fields are errors, matching the engine's strictness.
    """
    errors: dict[str, str] = {}
    declared = {field["name"]: field for field in schema["fields"]}
    for name in values:
        if name not in declared:
            errors[name] = "unknown field"
    for name, field in declared.items():
        if name not in values:
            if field.get("required", True):
                errors[name] = "required"
            continue
        problem = _check_rule(field["validation"], values[name])
        if problem is not None:
            errors[name] = problem
    return errors

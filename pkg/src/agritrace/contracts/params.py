"""Typed event-parameter payloads.

Every event carries its data as a list of ``(name, type, value)``
triples encoded into one byte string.  The wire format joins records
with the RS byte (0x1E) and fields within a record with the US byte
(0x1F); backslash escapes both separators and itself inside any field,
so arbitrary text round-trips.  Value texts are canonical per type --
decimal integers, shortest round-trip decimals, the enum label as
configured, a URI, ``uri US hexdigest`` for hash links and a content id
for uploads -- which makes re-encoding a decoded payload bit-stable.
"""

from __future__ import annotations

import re
from urllib.parse import urlsplit

from ..canonical import is_digest_hex
from ..config.model import PARAM_TYPES, ParamSpec
from ..errors import EncodingError, ParameterError

RECORD_SEP = "\x1e"
FIELD_SEP = "\x1f"
ESCAPE = "\\"

Triple = tuple[str, str, str]

_INT_RE = re.compile(r"-?[0-9]+")


def _escape(field: str) -> str:
    return (
        field.replace(ESCAPE, ESCAPE + ESCAPE)
        .replace(RECORD_SEP, ESCAPE + RECORD_SEP)
        .replace(FIELD_SEP, ESCAPE + FIELD_SEP)
    )


def _unescape(field: str) -> str:
    out: list[str] = []
    it = iter(field)
    for ch in it:
        if ch != ESCAPE:
            out.append(ch)
            continue
        try:
            nxt = next(it)
        except StopIteration:
            raise EncodingError("dangling escape at end of field") from None
        if nxt not in (ESCAPE, RECORD_SEP, FIELD_SEP):
            raise EncodingError(f"illegal escape sequence {ESCAPE!r}{nxt!r}")
        out.append(nxt)
    return "".join(out)


def _split_unescaped(text: str, sep: str) -> list[str]:
    """Split on ``sep`` occurrences that are not preceded by an escape."""
    parts: list[str] = []
    current: list[str] = []
    escaped = False
    for ch in text:
        if escaped:
            current.append(ch)
            escaped = False
        elif ch == ESCAPE:
            current.append(ch)
            escaped = True
        elif ch == sep:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def encode_parameters(triples: list[Triple]) -> bytes:
    """Encode ``(name, type, value)`` triples into the canonical payload."""
    seen: set[str] = set()
    records: list[str] = []
    for name, param_type, value in triples:
        if name in seen:
            raise EncodingError(f"duplicate parameter name {name!r}")
        seen.add(name)
        if param_type not in PARAM_TYPES:
            raise EncodingError(f"illegal parameter type tag {param_type!r}")
        records.append(FIELD_SEP.join(_escape(f) for f in (name, param_type, value)))
    return RECORD_SEP.join(records).encode("utf-8")


def decode_parameters(payload: bytes) -> list[Triple]:
    """Inverse of :func:`encode_parameters`; rejects malformed payloads."""
    if payload == b"":
        return []
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"payload is not UTF-8: {exc}") from exc
    triples: list[Triple] = []
    seen: set[str] = set()
    for record in _split_unescaped(text, RECORD_SEP):
        fields = _split_unescaped(record, FIELD_SEP)
        if len(fields) != 3:
            raise EncodingError(f"record has {len(fields)} fields, expected 3")
        name, param_type, value = (_unescape(f) for f in fields)
        if param_type not in PARAM_TYPES:
            raise EncodingError(f"illegal parameter type tag {param_type!r}")
        if name in seen:
            raise EncodingError(f"duplicate parameter name {name!r}")
        seen.add(name)
        triples.append((name, param_type, value))
    return triples


def make_hashlink(uri: str, digest_hex: str) -> str:
    """Canonical value text of a ``hashlink``: URI and digest joined by US."""
    return f"{uri}{FIELD_SEP}{digest_hex}"


def split_hashlink(value: str) -> tuple[str, str]:
    parts = value.split(FIELD_SEP)
    if len(parts) != 2:
        raise ParameterError("hashlink value must be a URI/digest pair")
    return parts[0], parts[1]


def _check_uri(text: str, name: str) -> str:
    try:
        parsed = urlsplit(text)
    except ValueError:
        raise ParameterError(f"parameter {name!r}: {text!r} is not a valid URI") from None
    if not parsed.scheme or not (parsed.netloc or parsed.path):
        raise ParameterError(f"parameter {name!r}: {text!r} is not a valid URI")
    return text


def canonical_value(spec: ParamSpec, value: object) -> str:
    """Validate ``value`` against ``spec`` and return its canonical text.

    Accepts native Python values or their text form; raises
    :class:`ParameterError` on any mismatch.
    """
    name = spec.name
    if isinstance(value, bool):
        raise ParameterError(f"parameter {name!r}: booleans are not a supported type")
    if spec.param_type == "int":
        if isinstance(value, int):
            return str(value)
        if isinstance(value, str) and _INT_RE.fullmatch(value):
            return str(int(value))
        raise ParameterError(f"parameter {name!r}: {value!r} is not an integer")
    if spec.param_type == "float":
        if isinstance(value, (int, float)):
            number = float(value)
        elif isinstance(value, str):
            try:
                number = float(value)
            except ValueError:
                raise ParameterError(f"parameter {name!r}: {value!r} is not a number") from None
        else:
            raise ParameterError(f"parameter {name!r}: {value!r} is not a number")
        if number != number or number in (float("inf"), float("-inf")):
            raise ParameterError(f"parameter {name!r}: value must be finite")
        return repr(number)
    if spec.param_type in ("string", "text"):
        if not isinstance(value, str):
            raise ParameterError(f"parameter {name!r}: expected a string")
        if spec.param_type == "string" and ("\n" in value or "\r" in value):
            raise ParameterError(f"parameter {name!r}: single-line string may not contain newlines")
        return value
    if spec.param_type == "enum":
        if not isinstance(value, str) or value not in spec.enum_options:
            raise ParameterError(
                f"parameter {name!r}: {value!r} is not one of {list(spec.enum_options)}"
            )
        return value
    if spec.param_type == "link":
        if not isinstance(value, str):
            raise ParameterError(f"parameter {name!r}: expected a URI string")
        return _check_uri(value, name)
    if spec.param_type == "hashlink":
        if isinstance(value, (tuple, list)) and len(value) == 2:
            uri, digest_hex = value
        elif isinstance(value, str):
            uri, digest_hex = split_hashlink(value)
        else:
            raise ParameterError(f"parameter {name!r}: expected a URI/digest pair")
        if not isinstance(uri, str):
            raise ParameterError(f"parameter {name!r}: URI part must be a string")
        _check_uri(uri, name)
        if not isinstance(digest_hex, str) or not is_digest_hex(digest_hex):
            raise ParameterError(f"parameter {name!r}: digest must be 32 bytes of hex")
        return make_hashlink(uri, digest_hex)
    if spec.param_type in ("upload", "hashupload"):
        if not isinstance(value, str) or not is_digest_hex(value):
            raise ParameterError(
                f"parameter {name!r}: expected a content id (32-byte hex digest)"
            )
        return value
    raise ParameterError(f"parameter {name!r}: unknown type {spec.param_type!r}")


def canonical_triples(
    specs: tuple[ParamSpec, ...], values: dict[str, object]
) -> list[Triple]:
    """Validate a name->value mapping against the specs, in spec order.

    Every declared parameter must be supplied and no extra names are
    accepted; events with optional data model it as an empty value of a
    text type.
    """
    unknown = sorted(set(values) - {s.name for s in specs})
    if unknown:
        raise ParameterError(f"unknown parameter name(s): {', '.join(unknown)}")
    triples: list[Triple] = []
    for spec in specs:
        if spec.name not in values:
            raise ParameterError(f"missing parameter {spec.name!r}")
        triples.append((spec.name, spec.param_type, canonical_value(spec, values[spec.name])))
    return triples

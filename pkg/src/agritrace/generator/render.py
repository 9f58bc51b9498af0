"""Rendering the contract IR to source targets.

Two targets: ``solidity`` (Ethereum-style contract sources, one file per
contract) and ``markdown`` (a human-readable data dictionary).  Both are
template-based over the IR and byte-deterministic, so outputs are
golden-file comparable.  Event parameters are emitted to the log, never
written into contract storage; only their digest lands in state.
"""

from __future__ import annotations

from jinja2 import Environment, StrictUndefined

from ..errors import TraceabilityError
from .ir import ContractDef, ContractIR

_SOLIDITY_TEMPLATE = """\
// SPDX-License-Identifier: MIT
// Generated from the supply-chain configuration; do not edit by hand.
pragma solidity ^0.8.0;
{% if contract.base %}
import "./{{ contract.base }}.sol";
{% else %}

interface AddressCatalog {
    function isAuthorized(address who, string memory method) external view returns (bool);
}
{% endif %}
{% if structs %}
{% for shape in structs %}

struct Asseveration {
    address certifier;
    bytes32 txRef;
}

/// {{ shape.comment }}
struct {{ shape.name }} {
{% for field in shape.state_fields %}
    {{ field.field_type }} {{ field.name }};{% if field.comment %} // {{ field.comment }}{% endif %}
{% endfor %}
}
{% endfor %}
{% endif %}

/// {{ contract.comment }}
{% if contract.is_abstract %}abstract {% endif %}contract {{ contract.name }}{% if contract.base %} is {{ contract.base }}{% endif %} {
{% for field in contract.state_fields %}
    {{ field.field_type }} {% if field.field_type in value_types %}public {% endif %}{{ field.name }};{% if field.comment %} // {{ field.comment }}{% endif %}
{% endfor %}
{% if contract.is_abstract %}

    function _appendEvent(string memory eventKindId, uint8 eventClass, bytes32 paramsDigest) internal {
        AgriEvent storage record = events.push();
        record.eventKindId = eventKindId;
        record.eventClass = eventClass;
        record.registrant = msg.sender;
        record.blockHeight = block.number;
        record.paramsDigest = paramsDigest;
    }
{% endif %}
{% for event in contract.log_events %}

    /// Topic for event kind "{{ event.event_kind_id }}"{% if event.param_specs %}; payload fields: {% for name, ptype in event.param_specs %}{{ name }}:{{ ptype }}{% if not loop.last %}, {% endif %}{% endfor %}{% endif %}.
    event {{ event.name }}({% for name, ptype in event.params %}{{ ptype }} {{ name }}{% if not loop.last %}, {% endif %}{% endfor %});
{% endfor %}
{% for method in contract.methods %}

    /// {{ method.comment }}
    /// Authorized actors: {{ method.authorized_actor_ids | join(", ") }}.
    function {{ method.name }}({% for name, ptype in method.params %}{{ ptype }}{{ " memory" if ptype in memory_types }} {{ name }}{% if not loop.last %}, {% endif %}{% endfor %}) external {
        require(AddressCatalog(catalog).isAuthorized(msg.sender, "{{ method.name }}"), "unauthorized");
{% if method.emits %}
        // Payload bytes are cheap in the event log and are read only by
        // external applications; storage keeps the digest alone.
        _appendEvent("{{ method.event_kind_id }}", {{ "0" if method.event_class == "D" else "1" }}, keccak256(parameters));
        emit {{ method.emits }}(address(this), msg.sender, parameters);
{% endif %}
    }
{% endfor %}
}
"""

_MARKDOWN_TEMPLATE = """\
# Contract model

Generated from the supply-chain configuration. One contract is deployed
per producer company, per productive resource and per product lot; the
`AgriEvent` record shape is shared.

{% for contract in ir.contracts %}
## {{ contract.name }}{% if contract.base %} (extends {{ contract.base }}){% endif %}

{{ contract.comment }}

{% if contract.state_fields %}
| State field | Type | Notes |
| --- | --- | --- |
{% for field in contract.state_fields %}
| `{{ field.name }}` | `{{ field.field_type }}` | {{ field.comment }} |
{% endfor %}
{% endif %}
{% if contract.log_events %}
| Log event | Payload | Parameter fields |
| --- | --- | --- |
{% for event in contract.log_events %}
| `{{ event.name }}` | {% for name, ptype in event.params %}`{{ ptype }} {{ name }}`{% if not loop.last %}, {% endif %}{% endfor %} | {% for name, ptype in event.param_specs %}{{ name }}:{{ ptype }}{% if not loop.last %}, {% endif %}{% else %}-{% endfor %} |
{% endfor %}
{% endif %}
{% if contract.methods %}
| Method | Arguments | Authorized actors | Emits |
| --- | --- | --- | --- |
{% for method in contract.methods %}
| `{{ method.name }}` | {% for name, ptype in method.params %}`{{ ptype }} {{ name }}`{% if not loop.last %}, {% endif %}{% else %}-{% endfor %} | {{ method.authorized_actor_ids | join(", ") }} | {{ method.emits or "-" }} |
{% endfor %}
{% endif %}
{% endfor %}
{% for shape in ir.record_shapes %}
## {{ shape.name }} (record shape)

{{ shape.comment }}

| Field | Type | Notes |
| --- | --- | --- |
{% for field in shape.state_fields %}
| `{{ field.name }}` | `{{ field.field_type }}` | {{ field.comment }} |
{% endfor %}
{% endfor %}
"""

_VALUE_TYPES = {"string", "address", "bool", "uint256", "uint8", "bytes32"}
_MEMORY_TYPES = {"string", "bytes", "string[]", "address[]", "uint256[]"}

_env = Environment(undefined=StrictUndefined, trim_blocks=True, lstrip_blocks=True)
_solidity = _env.from_string(_SOLIDITY_TEMPLATE)
_markdown = _env.from_string(_MARKDOWN_TEMPLATE)


def _render_contract(contract: ContractDef, structs: list[ContractDef]) -> str:
    return _solidity.render(
        contract=contract,
        structs=structs,
        value_types=_VALUE_TYPES,
        memory_types=_MEMORY_TYPES,
    )


def render_contracts(ir: ContractIR, target: str) -> dict[str, str]:
    """Render the IR; returns a ``filename -> text`` mapping."""
    if target in ("solidity", "sol", "ethereum"):
        files: dict[str, str] = {}
        for contract in ir.contracts:
            structs = list(ir.record_shapes) if contract.name == "AbstractResource" else []
            files[f"{contract.name}.sol"] = _render_contract(contract, structs)
        return files
    if target in ("markdown", "md"):
        return {"contracts.md": _markdown.render(ir=ir)}
    raise TraceabilityError(f"unknown render target {target!r}")

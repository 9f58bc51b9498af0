"""Automatic generation of contract definitions and UI form schemas."""

from .ir import ContractDef, ContractIR, LogEventSig, MethodSig, StateField, generate_contract_ir
from .render import render_contracts
from .forms import (
    WIDGET_BY_PARAM_TYPE,
    form_schema_doc,
    generate_all_form_schemas,
    generate_form_schema,
    validate_form_values,
)

__all__ = [
    "ContractDef",
    "ContractIR",
    "LogEventSig",
    "MethodSig",
    "StateField",
    "WIDGET_BY_PARAM_TYPE",
    "form_schema_doc",
    "generate_all_form_schemas",
    "generate_form_schema",
    "generate_contract_ir",
    "render_contracts",
    "validate_form_values",
]

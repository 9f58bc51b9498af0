"""Ledger operation handlers.

Every state change enters through one of these operations, dispatched
by the chain executor with the transaction's sender as caller.  Handlers
unpack and type-check arguments, then delegate to :class:`World`.
"""

from __future__ import annotations

from ..config.model import SupplyChainConfig
from ..errors import ContractError
from ..ledger.chain import ExecutionContext, OperationHandler
from .state import World

OP_REGISTER_ADDRESS = "catalog.register"
OP_CREATE_RESOURCE = "resource.create"
OP_RECORD_EVENT = "event.record"
OP_TRANSFORM = "product.transform"
OP_SPLIT = "product.split"
OP_MERGE = "product.merge"
OP_NOTARIZE = "document.notarize"
OP_ASSEVERATE = "record.asseverate"
OP_REQUEST_UNLOCK = "unlock.request"
OP_APPROVE_UNLOCK = "unlock.approve"
OP_PAY = "payment.send"

OP_IDS = (
    OP_REGISTER_ADDRESS,
    OP_CREATE_RESOURCE,
    OP_RECORD_EVENT,
    OP_TRANSFORM,
    OP_SPLIT,
    OP_MERGE,
    OP_NOTARIZE,
    OP_ASSEVERATE,
    OP_REQUEST_UNLOCK,
    OP_APPROVE_UNLOCK,
    OP_PAY,
)


def _arg(args: dict, name: str, types, required: bool = True, default=None):
    if name not in args or args[name] is None:
        if required:
            raise ContractError(f"missing argument {name!r}")
        return default
    value = args[name]
    if types is int and isinstance(value, bool):
        raise ContractError(f"argument {name!r} has wrong type")
    if not isinstance(value, types):
        raise ContractError(f"argument {name!r} has wrong type")
    return value


def _str_list(args: dict, name: str, required: bool = True) -> list[str]:
    value = _arg(args, name, list, required=required, default=[])
    if not all(isinstance(item, str) for item in value):
        raise ContractError(f"argument {name!r} must be a list of strings")
    return value


def _int_list(args: dict, name: str) -> list[int]:
    value = _arg(args, name, list)
    if not all(isinstance(item, int) and not isinstance(item, bool) for item in value):
        raise ContractError(f"argument {name!r} must be a list of integers")
    return value


def build_operations(config: SupplyChainConfig) -> dict[str, OperationHandler]:
    """Bind the operation table to one validated configuration."""

    def register_address(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        entry = world.register_address(
            caller=ctx.sender,
            address=_arg(args, "address", str),
            actor_id=_arg(args, "actor_id", str),
            roles=_str_list(args, "roles", required=False) or None,
            enabled=_arg(args, "enabled", bool, required=False, default=True),
        )
        return {"address": args["address"], "entry": entry}

    def create_resource(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        address = world.create_resource(
            caller=ctx.sender,
            company_name=_arg(args, "company", str),
            kind_id=_arg(args, "kind_id", str),
            description=_arg(args, "description", str, required=False, default=""),
            size=_arg(args, "size", int),
            unit=_arg(args, "unit", str, required=False),
        )
        return {"address": address}

    def record_event(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        index = world.record_event(
            caller=ctx.sender,
            ctx=ctx,
            entity_address=_arg(args, "entity", str),
            event_kind_id=_arg(args, "event_kind_id", str),
            values=_arg(args, "values", dict, required=False, default={}),
        )
        return {"entity": args["entity"], "event_index": index}

    def transform(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        outputs = _arg(args, "outputs", list)
        if not all(isinstance(item, dict) for item in outputs):
            raise ContractError("argument 'outputs' must be a list of objects")
        created = world.transform(
            caller=ctx.sender,
            ctx=ctx,
            input_addresses=_str_list(args, "inputs"),
            event_kind_id=_arg(args, "event_kind_id", str),
            outputs=outputs,
            values=_arg(args, "values", dict, required=False, default={}),
            company_name=_arg(args, "company", str, required=False),
        )
        return {"addresses": created}

    def split(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        created = world.split_product(
            caller=ctx.sender,
            ctx=ctx,
            product_address=_arg(args, "product", str),
            quantities=_int_list(args, "quantities"),
        )
        return {"addresses": created}

    def merge(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        created = world.merge_products(
            caller=ctx.sender,
            ctx=ctx,
            input_addresses=_str_list(args, "inputs"),
            quantities=_int_list(args, "quantities"),
        )
        return {"addresses": created}

    def notarize(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        metadata = _arg(args, "metadata", list, required=False, default=[])
        index = world.notarize(
            caller=ctx.sender,
            ctx=ctx,
            entity_address=_arg(args, "entity", str),
            document_digest=_arg(args, "digest", str),
            locator=_arg(args, "locator", str),
            metadata=[tuple(item) for item in metadata],
        )
        return {"entity": args["entity"], "event_index": index, "digest": args["digest"]}

    def asseverate(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        count = world.asseverate(
            caller=ctx.sender,
            ctx=ctx,
            entity_address=_arg(args, "entity", str),
            event_index=_arg(args, "event_index", int),
        )
        return {"entity": args["entity"], "asseverations": count}

    def request_unlock(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        unlock_id = world.request_unlock(
            caller=ctx.sender,
            event_kind_id=_arg(args, "event_kind_id", str),
            target_address=_arg(args, "target", str),
        )
        return {"unlock_id": unlock_id}

    def approve_unlock(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        status = world.approve_unlock(caller=ctx.sender, unlock_id=_arg(args, "unlock_id", str))
        return {"unlock_id": args["unlock_id"], "status": status}

    def pay(state: dict, ctx: ExecutionContext, args: dict) -> dict:
        world = World(config, state)
        sender_balance, recipient_balance = world.pay(
            sender=ctx.sender,
            recipient=_arg(args, "recipient", str),
            amount=_arg(args, "amount", int),
        )
        return {"sender_balance": sender_balance, "recipient_balance": recipient_balance}

    return {
        OP_REGISTER_ADDRESS: register_address,
        OP_CREATE_RESOURCE: create_resource,
        OP_RECORD_EVENT: record_event,
        OP_TRANSFORM: transform,
        OP_SPLIT: split,
        OP_MERGE: merge,
        OP_NOTARIZE: notarize,
        OP_ASSEVERATE: asseverate,
        OP_REQUEST_UNLOCK: request_unlock,
        OP_APPROVE_UNLOCK: approve_unlock,
        OP_PAY: pay,
    }

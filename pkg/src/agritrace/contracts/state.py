"""Domain state machines: catalog, producers, resources, products, tokens.

All mutating methods follow a strict validate-then-apply discipline:
every precondition is checked before the first write, so a raised
:class:`ContractError` guarantees untouched state.  The whole domain
state lives in one JSON-compatible document (the chain serializes it
canonically into state roots), and :class:`World` is a typed facade
over that document.

Quantities are integers in base units; token balances mirror the
quantities of active products per kind, so conservation is exact
integer arithmetic.  Yields are exact rationals.
"""

from __future__ import annotations

from fractions import Fraction

from ..canonical import digest, digest_hex, is_address, is_digest_hex
from ..config.model import CERTIFIER_ROLES, ROLES, EventKindDef, SupplyChainConfig
from ..errors import (
    AuthorizationError,
    ConservationError,
    ContractError,
    InsufficientFundsError,
    InvalidatedEntityError,
    KindMismatchError,
    LedgerError,
    LockedError,
    ParameterError,
    UnknownEntityError,
)
from .params import Triple, canonical_triples, encode_parameters

# Event ids of built-in operations; configured events may not use them.
SPLIT_EVENT = "split"
MERGE_EVENT = "merge"
NOTARIZATION_EVENT = "notarization"

ACTIVE = "active"
INVALIDATED = "invalidated"


def empty_state() -> dict:
    return {
        "catalog": {"owner": "", "entries": {}},
        "balances": {},
        "nonces": {},
        "producers": {},
        "producer_index": {},
        "entities": {},
        "tokens": {},
        "unlocks": {},
        "counters": {"entity": 0, "unlock": 0},
    }


def _allocate_address(state: dict, namespace: str) -> str:
    count = state["counters"]["entity"]
    state["counters"]["entity"] = count + 1
    return digest(f"{namespace}:{count}".encode("utf-8"))[-20:].hex()


def genesis_state(
    config: SupplyChainConfig,
    owner_address: str,
    bindings: list[tuple[str, str]],
    allocations: dict[str, int] | None = None,
) -> dict:
    """Build the pre-transaction state for a fresh chain.

    ``bindings`` maps account addresses to configured actor ids; the
    owner address must be bound to an administrator.  One producer
    contract is created per configured company.  ``allocations`` funds
    native balances (there is no minting after genesis).
    """
    state = empty_state()
    state["catalog"]["owner"] = owner_address
    bound = dict(bindings)
    if owner_address not in bound:
        raise ContractError("catalog owner address must be bound to an actor")
    for address, actor_id in bindings:
        actor = config.actors.get(actor_id)
        if actor is None:
            raise ContractError(f"binding references unknown actor {actor_id!r}")
        state["catalog"]["entries"][address] = {
            "actor_id": actor_id,
            "roles": [actor.role],
            "enabled": True,
        }
    owner_actor = config.actors[bound[owner_address]]
    if owner_actor.role != "administrator":
        raise ContractError("catalog owner must hold the administrator role")
    for company in config.companies.values():
        address = _allocate_address(state, "producer")
        state["producers"][address] = {"company": company.name, "owned": []}
        state["producer_index"][company.name] = address
    for address, amount in (allocations or {}).items():
        if not isinstance(amount, int) or amount < 0:
            raise ContractError("genesis allocations must be non-negative integers")
        state["balances"][address] = amount
    return state


class World:
    """Typed facade over the persistent domain state document."""

    def __init__(self, config: SupplyChainConfig, state: dict):
        self.config = config
        self.state = state

    # -- catalog ---------------------------------------------------------

    @property
    def catalog_owner(self) -> str:
        return self.state["catalog"]["owner"]

    def catalog_entry(self, address: str) -> dict | None:
        return self.state["catalog"]["entries"].get(address)

    def _require_enabled(self, address: str) -> tuple[str, list[str]]:
        entry = self.catalog_entry(address)
        if entry is None:
            raise AuthorizationError(f"address {address} is not registered in the catalog")
        if not entry["enabled"]:
            raise AuthorizationError(f"address {address} is disabled")
        return entry["actor_id"], entry["roles"]

    def register_address(
        self,
        caller: str,
        address: str,
        actor_id: str,
        roles: list[str] | None = None,
        enabled: bool = True,
    ) -> dict:
        if caller != self.catalog_owner:
            raise AuthorizationError("only the catalog owner may manage addresses")
        if not is_address(address):
            raise ContractError(f"{address!r} is not a valid 20-byte address")
        actor = self.config.actors.get(actor_id)
        if actor is None:
            raise ContractError(f"unknown actor {actor_id!r}")
        if roles is None:
            roles = [actor.role]
        bad = sorted(set(roles) - set(ROLES))
        if bad:
            raise ContractError(f"unknown role(s): {', '.join(bad)}")
        entry = {"actor_id": actor_id, "roles": list(roles), "enabled": bool(enabled)}
        self.state["catalog"]["entries"][address] = entry
        return entry

    # -- entity access -----------------------------------------------------

    def entity(self, address: str) -> dict:
        entity = self.state["entities"].get(address)
        if entity is None:
            raise UnknownEntityError(f"unknown entity {address}")
        return entity

    def has_entity(self, address: str) -> bool:
        return address in self.state["entities"]

    def _require_active(self, address: str) -> dict:
        entity = self.entity(address)
        if entity["status"] != ACTIVE:
            raise InvalidatedEntityError(f"entity {address} is invalidated")
        return entity

    def _kind(self, kind_id: str):
        kind = self.config.kinds.get(kind_id)
        if kind is None:
            raise ContractError(f"unknown kind {kind_id!r}")
        return kind

    def _event_kind(self, event_kind_id: str) -> EventKindDef:
        event = self.config.event_kinds.get(event_kind_id)
        if event is None:
            raise ContractError(f"unknown event kind {event_kind_id!r}")
        return event

    def _require_kind_authorized(self, actor_id: str, kind_id: str) -> None:
        kind = self._kind(kind_id)
        if actor_id not in kind.authorized_actor_ids:
            raise AuthorizationError(
                f"actor {actor_id!r} is not authorized for kind {kind_id!r}"
            )

    def _producer(self, address: str) -> dict:
        producer = self.state["producers"].get(address)
        if producer is None:
            raise ContractError(f"unknown producer contract {address}")
        return producer

    def producer_for_company(self, company_name: str) -> str:
        address = self.state["producer_index"].get(company_name)
        if address is None:
            raise ContractError(f"no producer contract for company {company_name!r}")
        return address

    # -- resources ---------------------------------------------------------

    def create_resource(
        self,
        caller: str,
        company_name: str,
        kind_id: str,
        description: str,
        size: int,
        unit: str | None = None,
    ) -> str:
        actor_id, _roles = self._require_enabled(caller)
        kind = self._kind(kind_id)
        if kind.kind_class != "R":
            raise KindMismatchError(f"kind {kind_id!r} is not a productive-resource kind")
        self._require_kind_authorized(actor_id, kind_id)
        company = self.config.companies.get(company_name)
        if company is None:
            raise ContractError(f"unknown company {company_name!r}")
        if actor_id not in company.authorized_actor_ids:
            raise AuthorizationError(
                f"actor {actor_id!r} is not authorized for company {company_name!r}"
            )
        if kind_id not in company.resource_ids:
            raise ContractError(f"company {company_name!r} does not manage kind {kind_id!r}")
        producer_address = self.producer_for_company(company_name)
        if not isinstance(size, int) or isinstance(size, bool) or size <= 0:
            raise ContractError("resource size must be a positive integer")
        unit = unit or kind.default_unit
        if not unit:
            raise ContractError(f"kind {kind_id!r} declares no unit; one must be given")

        address = _allocate_address(self.state, "resource")
        self.state["entities"][address] = {
            "class": "R",
            "kind_id": kind_id,
            "producer": producer_address,
            "status": ACTIVE,
            "description": description,
            "quantity": size,
            "unit": unit,
            "produced": [],
            "events": [],
        }
        self._producer(producer_address)["owned"].append(address)
        return address

    # -- documentation events ------------------------------------------------

    def record_event(
        self, caller: str, ctx, entity_address: str, event_kind_id: str, values: dict
    ) -> int:
        actor_id, _roles = self._require_enabled(caller)
        event = self._event_kind(event_kind_id)
        if event.event_class != "D":
            raise ContractError(
                f"event {event_kind_id!r} is a transformation; use the transform operation"
            )
        entity = self._require_active(entity_address)
        if entity["kind_id"] not in event.applicable_kind_ids:
            raise KindMismatchError(
                f"event {event_kind_id!r} does not apply to kind {entity['kind_id']!r}"
            )
        if actor_id not in event.authorized_actor_ids:
            raise AuthorizationError(
                f"actor {actor_id!r} is not authorized to record {event_kind_id!r}"
            )
        self._require_kind_authorized(actor_id, entity["kind_id"])
        triples = canonical_triples(event.param_specs, values)
        payload = encode_parameters(triples)

        record = self._event_record(event_kind_id, "D", caller, ctx, payload)
        entity["events"].append(record)
        ctx.emit(entity_address, event_kind_id, payload)
        return len(entity["events"]) - 1

    def _event_record(self, event_kind_id: str, event_class: str, caller: str, ctx, payload: bytes) -> dict:
        return {
            "event_kind_id": event_kind_id,
            "event_class": event_class,
            "registrant": caller,
            "block_height": ctx.block_height,
            "tx_hash": ctx.tx_hash,
            "params_digest": digest_hex(payload),
            "asseverations": [],
        }

    # -- transformations -------------------------------------------------------

    def _check_output_spec(self, event: EventKindDef, outputs: list[dict]) -> list[tuple[str, int, str]]:
        if not outputs:
            raise ContractError("transformation must declare at least one output")
        checked = []
        for output in outputs:
            kind_id = output.get("kind_id")
            if kind_id not in event.generated_kind_ids:
                raise KindMismatchError(
                    f"event {event.id!r} cannot generate kind {kind_id!r}"
                )
            kind = self._kind(kind_id)
            if kind.kind_class != "P":
                raise KindMismatchError(f"generated kind {kind_id!r} is not a product kind")
            quantity = output.get("quantity")
            if not isinstance(quantity, int) or isinstance(quantity, bool) or quantity < 0:
                raise ContractError("output quantity must be a non-negative integer")
            unit = output.get("unit") or kind.default_unit
            if not unit:
                raise ContractError(f"kind {kind_id!r} declares no unit; one must be given")
            checked.append((kind_id, quantity, unit))
        return checked

    def _find_unlock(self, event_kind_id: str, input_addresses: list[str]) -> str | None:
        for unlock_id in sorted(self.state["unlocks"]):
            request = self.state["unlocks"][unlock_id]
            if (
                request["event_kind_id"] == event_kind_id
                and request["target"] in input_addresses
                and request["status"] == "unlocked"
            ):
                return unlock_id
        return None

    def _create_product(
        self,
        kind_id: str,
        quantity: int,
        unit: str,
        producer_address: str,
        origins: list[str],
        token_holder: str,
    ) -> str:
        address = _allocate_address(self.state, "product")
        self.state["entities"][address] = {
            "class": "P",
            "kind_id": kind_id,
            "producer": producer_address,
            "status": ACTIVE,
            "quantity": quantity,
            "unit": unit,
            "origins": list(origins),
            "produced": [],
            "events": [],
            "token_holder": token_holder,
        }
        self._producer(producer_address)["owned"].append(address)
        self._mint(kind_id, token_holder, quantity)
        return address

    def _mint(self, kind_id: str, holder: str, amount: int) -> None:
        balances = self.state["tokens"].setdefault(kind_id, {})
        balances[holder] = balances.get(holder, 0) + amount

    def _burn(self, kind_id: str, holder: str, amount: int) -> None:
        balances = self.state["tokens"].get(kind_id, {})
        held = balances.get(holder, 0)
        if held < amount:
            # Mint and burn are paired with product lifecycle; reaching
            # this indicates an engine bug, not a rejected transaction.
            raise LedgerError(f"token ledger underflow for kind {kind_id!r}")
        remaining = held - amount
        if remaining:
            balances[holder] = remaining
        else:
            balances.pop(holder, None)
        if not balances:
            self.state["tokens"].pop(kind_id, None)

    def _invalidate_product(self, address: str) -> None:
        entity = self.state["entities"][address]
        entity["status"] = INVALIDATED
        self._burn(entity["kind_id"], entity["token_holder"], entity["quantity"])

    def transform(
        self,
        caller: str,
        ctx,
        input_addresses: list[str],
        event_kind_id: str,
        outputs: list[dict],
        values: dict,
        company_name: str | None = None,
    ) -> list[str]:
        actor_id, _roles = self._require_enabled(caller)
        event = self._event_kind(event_kind_id)
        if event.event_class != "T":
            raise ContractError(f"event {event_kind_id!r} is not a transformation")
        if actor_id not in event.authorized_actor_ids:
            raise AuthorizationError(
                f"actor {actor_id!r} is not authorized to run {event_kind_id!r}"
            )
        if not input_addresses:
            raise ContractError("transformation must consume at least one input")
        if len(set(input_addresses)) != len(input_addresses):
            raise ContractError("duplicate input addresses")
        inputs = []
        for address in input_addresses:
            entity = self._require_active(address)
            if entity["kind_id"] not in event.applicable_kind_ids:
                raise KindMismatchError(
                    f"event {event_kind_id!r} does not apply to kind {entity['kind_id']!r}"
                )
            self._require_kind_authorized(actor_id, entity["kind_id"])
            inputs.append(entity)
        checked_outputs = self._check_output_spec(event, outputs)

        unlock_id = None
        if event.required_unlock_actor_ids:
            unlock_id = self._find_unlock(event_kind_id, input_addresses)
            if unlock_id is None:
                raise LockedError(
                    f"event {event_kind_id!r} requires an unlocked approval request"
                )

        total_in = sum(entity["quantity"] for entity in inputs)
        total_out = sum(quantity for _kind, quantity, _unit in checked_outputs)
        if Fraction(total_out) > event.max_yield * Fraction(total_in):
            raise ConservationError(
                f"outputs total {total_out} exceeds yield bound "
                f"{event.max_yield} x {total_in}"
            )

        if company_name is not None:
            company = self.config.companies.get(company_name)
            if company is None:
                raise ContractError(f"unknown company {company_name!r}")
            if actor_id not in company.authorized_actor_ids:
                raise AuthorizationError(
                    f"actor {actor_id!r} is not authorized for company {company_name!r}"
                )
            producer_address = self.producer_for_company(company_name)
        else:
            producer_address = inputs[0]["producer"]

        triples = canonical_triples(event.param_specs, values)
        payload = encode_parameters(triples)

        # validation complete; apply
        for address, entity in zip(input_addresses, inputs):
            if entity["class"] == "P":
                self._invalidate_product(address)
        created = []
        for kind_id, quantity, unit in checked_outputs:
            created.append(
                self._create_product(
                    kind_id, quantity, unit, producer_address, input_addresses, caller
                )
            )
        for entity in inputs:
            entity["produced"].extend(created)
        for address in created:
            record = self._event_record(event_kind_id, "T", caller, ctx, payload)
            self.state["entities"][address]["events"].append(record)
            ctx.emit(address, event_kind_id, payload)
        if unlock_id is not None:
            self.state["unlocks"][unlock_id]["status"] = "consumed"
        return created

    def split_product(
        self, caller: str, ctx, product_address: str, quantities: list[int]
    ) -> list[str]:
        actor_id, _roles = self._require_enabled(caller)
        product = self._require_active(product_address)
        if product["class"] != "P":
            raise KindMismatchError("only products can be split")
        self._require_kind_authorized(actor_id, product["kind_id"])
        if not quantities:
            raise ContractError("split requires at least one part")
        for quantity in quantities:
            if not isinstance(quantity, int) or isinstance(quantity, bool) or quantity <= 0:
                raise ConservationError("split parts must be positive integers")
        if sum(quantities) != product["quantity"]:
            raise ConservationError(
                f"split parts total {sum(quantities)} but product holds {product['quantity']}"
            )

        self._invalidate_product(product_address)
        payload = encode_parameters([])
        created = []
        for quantity in quantities:
            address = self._create_product(
                product["kind_id"],
                quantity,
                product["unit"],
                product["producer"],
                [product_address],
                caller,
            )
            created.append(address)
            record = self._event_record(SPLIT_EVENT, "T", caller, ctx, payload)
            self.state["entities"][address]["events"].append(record)
            ctx.emit(address, SPLIT_EVENT, payload)
        product["produced"].extend(created)
        return created

    def merge_products(
        self, caller: str, ctx, input_addresses: list[str], quantities: list[int]
    ) -> list[str]:
        actor_id, _roles = self._require_enabled(caller)
        if not input_addresses:
            raise ContractError("merge requires at least one input")
        if len(set(input_addresses)) != len(input_addresses):
            raise ContractError("duplicate input addresses")
        inputs = [self._require_active(address) for address in input_addresses]
        for entity in inputs:
            if entity["class"] != "P":
                raise KindMismatchError("only products can be merged")
        kind_ids = {entity["kind_id"] for entity in inputs}
        if len(kind_ids) != 1:
            raise KindMismatchError(f"merge inputs span kinds {sorted(kind_ids)}")
        units = {entity["unit"] for entity in inputs}
        if len(units) != 1:
            raise KindMismatchError(f"merge inputs span units {sorted(units)}")
        kind_id = kind_ids.pop()
        self._require_kind_authorized(actor_id, kind_id)
        if not quantities:
            raise ContractError("merge requires at least one output")
        for quantity in quantities:
            if not isinstance(quantity, int) or isinstance(quantity, bool) or quantity <= 0:
                raise ConservationError("merge outputs must be positive integers")
        total_in = sum(entity["quantity"] for entity in inputs)
        if sum(quantities) != total_in:
            raise ConservationError(
                f"merge outputs total {sum(quantities)} but inputs hold {total_in}"
            )

        for address in input_addresses:
            self._invalidate_product(address)
        unit = units.pop()
        payload = encode_parameters([])
        created = []
        for quantity in quantities:
            address = self._create_product(
                kind_id, quantity, unit, inputs[0]["producer"], input_addresses, caller
            )
            created.append(address)
            record = self._event_record(MERGE_EVENT, "T", caller, ctx, payload)
            self.state["entities"][address]["events"].append(record)
            ctx.emit(address, MERGE_EVENT, payload)
        for entity in inputs:
            entity["produced"].extend(created)
        return created

    # -- notarization and certification --------------------------------------

    def notarize(
        self,
        caller: str,
        ctx,
        entity_address: str,
        document_digest: str,
        locator: str,
        metadata: list[Triple] | None = None,
    ) -> int:
        actor_id, _roles = self._require_enabled(caller)
        entity = self._require_active(entity_address)
        self._require_kind_authorized(actor_id, entity["kind_id"])
        if not is_digest_hex(document_digest):
            raise ContractError("document digest must be 32 bytes of hex")
        if not locator:
            raise ContractError("a retrieval locator is required")
        triples: list[Triple] = [
            ("digest", "string", document_digest),
            ("locator", "string", locator),
        ]
        for item in metadata or []:
            if not (isinstance(item, (list, tuple)) and len(item) == 3):
                raise ParameterError("metadata entries must be (name, type, value) triples")
            triples.append((str(item[0]), str(item[1]), str(item[2])))
        payload = encode_parameters(triples)

        record = self._event_record(NOTARIZATION_EVENT, "D", caller, ctx, payload)
        record["digest"] = document_digest
        record["locator"] = locator
        entity["events"].append(record)
        ctx.emit(entity_address, NOTARIZATION_EVENT, payload)
        return len(entity["events"]) - 1

    def asseverate(self, caller: str, ctx, entity_address: str, event_index: int) -> int:
        _actor_id, roles = self._require_enabled(caller)
        if not any(role in CERTIFIER_ROLES for role in roles):
            raise AuthorizationError(
                "asseveration requires a certification authority, professional or analysis lab"
            )
        entity = self.entity(entity_address)
        events = entity["events"]
        if not isinstance(event_index, int) or not 0 <= event_index < len(events):
            raise ContractError(f"entity {entity_address} has no event {event_index}")
        events[event_index]["asseverations"].append(
            {"certifier": caller, "tx_hash": ctx.tx_hash}
        )
        return len(events[event_index]["asseverations"])

    # -- unlocking -------------------------------------------------------------

    def request_unlock(self, caller: str, event_kind_id: str, target_address: str) -> str:
        actor_id, _roles = self._require_enabled(caller)
        event = self._event_kind(event_kind_id)
        if event.event_class != "T" or not event.required_unlock_actor_ids:
            raise ContractError(f"event {event_kind_id!r} requires no unlocking")
        if actor_id not in event.authorized_actor_ids:
            raise AuthorizationError(
                f"actor {actor_id!r} is not authorized to run {event_kind_id!r}"
            )
        self._require_active(target_address)
        required: list[str] = []
        for approver_actor in event.required_unlock_actor_ids:
            addresses = sorted(
                address
                for address, entry in self.state["catalog"]["entries"].items()
                if entry["actor_id"] == approver_actor and entry["enabled"]
            )
            if not addresses:
                raise ContractError(
                    f"no enabled address for required approver actor {approver_actor!r}"
                )
            required.extend(addresses)

        count = self.state["counters"]["unlock"]
        self.state["counters"]["unlock"] = count + 1
        unlock_id = f"unlock-{count:06d}"
        self.state["unlocks"][unlock_id] = {
            "event_kind_id": event_kind_id,
            "target": target_address,
            "required": sorted(set(required)),
            "approved": [],
            "status": "pending",
        }
        return unlock_id

    def approve_unlock(self, caller: str, unlock_id: str) -> str:
        self._require_enabled(caller)
        request = self.state["unlocks"].get(unlock_id)
        if request is None:
            raise ContractError(f"unknown unlock request {unlock_id!r}")
        if request["status"] == "consumed":
            raise ContractError(f"unlock request {unlock_id!r} was already consumed")
        if request["status"] != "pending":
            raise ContractError(f"unlock request {unlock_id!r} is not pending")
        if caller not in request["required"]:
            raise AuthorizationError(f"address {caller} is not a required approver")
        if caller not in request["approved"]:
            request["approved"].append(caller)
            request["approved"].sort()
        if set(request["approved"]) >= set(request["required"]):
            request["status"] = "unlocked"
        return request["status"]

    # -- payment ----------------------------------------------------------------

    def pay(self, sender: str, recipient: str, amount: int) -> tuple[int, int]:
        self._require_enabled(sender)
        if not is_address(recipient):
            raise ContractError(f"{recipient!r} is not a valid recipient address")
        if not isinstance(amount, int) or isinstance(amount, bool) or amount <= 0:
            raise ContractError("payment amount must be a positive integer")
        balances = self.state["balances"]
        held = balances.get(sender, 0)
        if held < amount:
            raise InsufficientFundsError(
                f"balance {held} is insufficient for payment of {amount}"
            )
        balances[sender] = held - amount
        balances[recipient] = balances.get(recipient, 0) + amount
        return balances[sender], balances[recipient]

    # -- queries ------------------------------------------------------------------

    def token_supply(self) -> dict[str, int]:
        return {
            kind_id: sum(holders.values())
            for kind_id, holders in sorted(self.state["tokens"].items())
        }

    def active_product_quantities(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for entity in self.state["entities"].values():
            if entity["class"] == "P" and entity["status"] == ACTIVE:
                totals[entity["kind_id"]] = totals.get(entity["kind_id"], 0) + entity["quantity"]
        return dict(sorted(totals.items()))

    def native_balance(self, address: str) -> int:
        return self.state["balances"].get(address, 0)

    def total_native_supply(self) -> int:
        return sum(self.state["balances"].values())

"""HTTP API consumed by the web client and integrators.

Every mutating endpoint is a thin wrapper over one ledger operation:
the request is signed with the session actor's key, submitted, sealed,
and the receipt returned; a contract rejection surfaces as 403/404/422
carrying the contract error code verbatim.  Mutating endpoints honor an
``Idempotency-Key`` header: replaying a key returns the original
receipt without a second transaction.  Consumer provenance endpoints
require no session.
"""

from __future__ import annotations

import secrets
import threading

from fastapi import Depends, FastAPI, File, Form, Header, HTTPException, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..config import serialize_config
from ..contracts import ops
from ..errors import (
    AuthorizationError,
    ContractError,
    DocStoreError,
    DocumentNotFoundError,
    IntegrityError,
    KeystoreError,
    TraceabilityError,
    TraceQueryError,
    UnknownEntityError,
)
from ..generator import form_schema_doc, generate_all_form_schemas
from ..provenance import parse_qr_payload, render_trace
from .runtime import Node

API_PREFIX = "/api/v1"


class SessionRequest(BaseModel):
    actor_id: str
    passphrase: str


class EventRequest(BaseModel):
    entity: str
    event_kind_id: str
    values: dict = Field(default_factory=dict)


class SplitRequest(BaseModel):
    quantities: list[int]


class MergeRequest(BaseModel):
    others: list[str]
    quantities: list[int]


class OutputSpec(BaseModel):
    kind_id: str
    quantity: int
    unit: str | None = None


class TransformRequest(BaseModel):
    inputs: list[str]
    event_kind_id: str
    outputs: list[OutputSpec]
    values: dict = Field(default_factory=dict)
    company: str | None = None


class NotarizeByDigestRequest(BaseModel):
    entity: str
    digest: str
    locator: str
    metadata: list[list[str]] = Field(default_factory=list)


class AsseverateRequest(BaseModel):
    entity: str
    event_index: int


class UnlockRequestBody(BaseModel):
    event_kind_id: str
    target: str


class PayRequest(BaseModel):
    recipient: str | None = None
    recipient_actor: str | None = None
    amount: int


def _http_error(exc: TraceabilityError) -> HTTPException:
    if isinstance(exc, (UnknownEntityError, DocumentNotFoundError)):
        status = 404
    elif isinstance(exc, AuthorizationError):
        status = 403
    elif isinstance(exc, IntegrityError):
        status = 409
    elif isinstance(exc, KeystoreError):
        status = 401
    else:
        status = 422
    return HTTPException(status_code=status, detail={"code": exc.code, "message": exc.message})


def create_app(node: Node, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="agritrace", version="0.1.0")
    sessions: dict[str, str] = {}
    idempotency_cache: dict[str, dict] = {}
    execute_gate = threading.Lock()

    def current_actor(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail={"code": "no-session"})
        token = authorization.removeprefix("Bearer ")
        actor_id = sessions.get(token)
        if actor_id is None:
            raise HTTPException(status_code=401, detail={"code": "bad-session"})
        return actor_id

    def run_operation(actor_id: str, operation: str, args: dict, idempotency_key: str | None):
        """Execute one ledger operation for the session actor."""
        with execute_gate:
            if idempotency_key is not None and idempotency_key in idempotency_cache:
                return idempotency_cache[idempotency_key]
            try:
                receipt = node.execute(actor_id, operation, args)
            except TraceabilityError as exc:
                raise _http_error(exc) from exc
            doc = receipt.to_doc()
            if not receipt.ok:
                status = 403 if receipt.error_code == "unauthorized" else 422
                raise HTTPException(
                    status_code=status,
                    detail={"code": receipt.error_code, "message": receipt.error_message},
                )
            if idempotency_key is not None:
                idempotency_cache[idempotency_key] = doc
            return doc

    # -- session ---------------------------------------------------------

    @app.post(API_PREFIX + "/session")
    def open_session(body: SessionRequest):
        if body.actor_id not in node.config.actors:
            raise HTTPException(status_code=404, detail={"code": "unknown-actor"})
        if not node.keystore.check_passphrase(body.passphrase):
            raise HTTPException(status_code=401, detail={"code": "bad-passphrase"})
        try:
            node.keystore.keypair(body.actor_id)
            address = node.address_of(body.actor_id)
        except (KeystoreError, TraceabilityError) as exc:
            raise _http_error(exc) from exc
        token = secrets.token_urlsafe(24)
        sessions[token] = body.actor_id
        entry = node.chain.state["catalog"]["entries"][address]
        config_actor = node.config.actors[body.actor_id]
        return {
            "token": token,
            "actor_id": body.actor_id,
            "actor_name": config_actor.name,
            "address": address,
            "roles": entry["roles"],
            "enabled": entry["enabled"],
        }

    # -- read side ---------------------------------------------------------

    @app.get(API_PREFIX + "/config")
    def get_config():
        return serialize_config(node.config)

    @app.get(API_PREFIX + "/schemas")
    def get_schemas():
        return form_schema_doc(generate_all_form_schemas(node.config))

    @app.get(API_PREFIX + "/chain")
    def get_chain_info():
        chain = node.chain
        return {
            "chain_id": chain.chain_id,
            "height": chain.height,
            "blocks": len(chain.blocks),
            "transactions": sum(len(b.transactions) for b in chain.blocks),
        }

    @app.get(API_PREFIX + "/entities/{address}")
    def get_entity(address: str):
        try:
            entity = node.world.entity(address)
        except TraceabilityError as exc:
            raise _http_error(exc) from exc
        doc = dict(entity)
        doc["address"] = address
        producer = node.chain.state["producers"].get(entity["producer"], {})
        doc["company"] = producer.get("company", "")
        return doc

    @app.get(API_PREFIX + "/entities/{address}/trace")
    def get_trace(address: str, dir: str = "back", max_depth: int | None = None):
        try:
            if dir == "back":
                return node.reader.trace_back(address, max_depth).to_doc()
            if dir == "forward":
                return {"descendants": node.reader.trace_forward(address)}
        except TraceabilityError as exc:
            raise _http_error(exc) from exc
        raise HTTPException(status_code=422, detail={"code": "bad-direction"})

    @app.get(API_PREFIX + "/entities/{address}/trace.txt", response_class=PlainTextResponse)
    def get_trace_text(address: str):
        try:
            return render_trace(node.reader.trace_back(address), "text")
        except TraceabilityError as exc:
            raise _http_error(exc) from exc

    @app.get(API_PREFIX + "/qr/{address}")
    def get_qr(address: str):
        try:
            payload = node.reader.qr_payload(address)
        except TraceabilityError as exc:
            raise _http_error(exc) from exc
        return {"payload": payload.render(), "chain_id": payload.chain_id, "address": address}

    @app.get(API_PREFIX + "/resolve")
    def resolve_qr(payload: str):
        try:
            parsed = parse_qr_payload(payload)
        except TraceabilityError as exc:
            raise _http_error(exc) from exc
        if parsed.chain_id != node.chain.chain_id:
            raise HTTPException(status_code=404, detail={"code": "wrong-chain"})
        return {"chain_id": parsed.chain_id, "address": parsed.address}

    @app.get(API_PREFIX + "/tokens")
    def get_tokens():
        world = node.world
        return {
            "supply": world.token_supply(),
            "balances": node.chain.state["tokens"],
            "active_product_quantities": world.active_product_quantities(),
        }

    @app.get(API_PREFIX + "/unlocks")
    def get_unlocks():
        return {"items": node.chain.state["unlocks"]}

    @app.get(API_PREFIX + "/documents/{content_id}")
    def get_document(content_id: str):
        try:
            content = node.docstore.get(content_id)
            meta = node.docstore.stat(content_id)
        except TraceabilityError as exc:
            raise _http_error(exc) from exc
        return Response(content=content, media_type=meta.media_type)

    # -- write side ----------------------------------------------------------

    @app.post(API_PREFIX + "/events")
    def post_event(
        body: EventRequest,
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        args = {"entity": body.entity, "event_kind_id": body.event_kind_id, "values": body.values}
        return run_operation(actor_id, ops.OP_RECORD_EVENT, args, idempotency_key)

    @app.post(API_PREFIX + "/products/{address}/split")
    def post_split(
        address: str,
        body: SplitRequest,
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        args = {"product": address, "quantities": body.quantities}
        return run_operation(actor_id, ops.OP_SPLIT, args, idempotency_key)

    @app.post(API_PREFIX + "/products/{address}/merge")
    def post_merge(
        address: str,
        body: MergeRequest,
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        args = {"inputs": [address, *body.others], "quantities": body.quantities}
        return run_operation(actor_id, ops.OP_MERGE, args, idempotency_key)

    @app.post(API_PREFIX + "/transform")
    def post_transform(
        body: TransformRequest,
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        args = {
            "inputs": body.inputs,
            "event_kind_id": body.event_kind_id,
            "outputs": [spec.model_dump(exclude_none=True) for spec in body.outputs],
            "values": body.values,
        }
        if body.company is not None:
            args["company"] = body.company
        return run_operation(actor_id, ops.OP_TRANSFORM, args, idempotency_key)

    @app.post(API_PREFIX + "/notarize")
    async def post_notarize(
        entity: str = Form(...),
        media_type: str = Form(default="application/octet-stream"),
        document: UploadFile = File(...),
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        content = await document.read()
        try:
            content_id = node.docstore.put(content, media_type=media_type)
        except DocStoreError as exc:
            raise _http_error(exc) from exc
        args = {
            "entity": entity,
            "digest": content_id,
            "locator": node.docstore.locator_for(content_id),
            "metadata": [["filename", "string", document.filename or ""]],
        }
        doc = run_operation(actor_id, ops.OP_NOTARIZE, args, idempotency_key)
        return JSONResponse({**doc, "content_id": content_id})

    @app.post(API_PREFIX + "/notarize/digest")
    def post_notarize_digest(
        body: NotarizeByDigestRequest,
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        args = {
            "entity": body.entity,
            "digest": body.digest,
            "locator": body.locator,
            "metadata": body.metadata,
        }
        return run_operation(actor_id, ops.OP_NOTARIZE, args, idempotency_key)

    @app.post(API_PREFIX + "/asseverate")
    def post_asseverate(
        body: AsseverateRequest,
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        args = {"entity": body.entity, "event_index": body.event_index}
        return run_operation(actor_id, ops.OP_ASSEVERATE, args, idempotency_key)

    @app.post(API_PREFIX + "/unlock")
    def post_unlock_request(
        body: UnlockRequestBody,
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        args = {"event_kind_id": body.event_kind_id, "target": body.target}
        return run_operation(actor_id, ops.OP_REQUEST_UNLOCK, args, idempotency_key)

    @app.post(API_PREFIX + "/unlock/{unlock_id}/approve")
    def post_unlock_approve(
        unlock_id: str,
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        return run_operation(actor_id, ops.OP_APPROVE_UNLOCK, {"unlock_id": unlock_id}, idempotency_key)

    @app.post(API_PREFIX + "/pay")
    def post_pay(
        body: PayRequest,
        actor_id: str = Depends(current_actor),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        recipient = body.recipient
        if recipient is None and body.recipient_actor is not None:
            try:
                recipient = node.address_of(body.recipient_actor)
            except TraceabilityError as exc:
                raise _http_error(exc) from exc
        if recipient is None:
            raise HTTPException(status_code=422, detail={"code": "missing-recipient"})
        args = {"recipient": recipient, "amount": body.amount}
        return run_operation(actor_id, ops.OP_PAY, args, idempotency_key)

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="webui")

    return app

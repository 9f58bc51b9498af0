"""``trace`` command line interface.

Paths default from environment variables (TRACE_CONFIG_DIR,
TRACE_CHAIN_FILE, TRACE_DOCSTORE_DIR, TRACE_KEYSTORE_FILE,
TRACE_KEYSTORE_PASSPHRASE, TRACE_GAS_SCHEDULE) so scripts can set a
deployment once.  ``--json`` switches output to machine-readable JSON.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .. import __version__
from ..config import load_config_dir
from ..config.loader import DESCRIPTOR_FILENAMES, load_descriptor_file
from ..config.validate import collect_violations
from ..contracts import build_operations, ops
from ..docstore import DocStore
from ..errors import DescriptorParseError, TraceabilityError, UnsupportedDescriptorError
from ..generator import (
    form_schema_doc,
    generate_all_form_schemas,
    generate_contract_ir,
    render_contracts,
)
from ..ledger import DEFAULT_GAS_SCHEDULE, GasSchedule, estimate_gas, verify_chain_file
from ..provenance import render_trace
from .runtime import Node, NodePaths


class Context:
    def __init__(self):
        self.paths: NodePaths | None = None
        self.passphrase: str = ""
        self.schedule: GasSchedule = DEFAULT_GAS_SCHEDULE
        self.as_json: bool = False
        self._node: Node | None = None

    def node(self) -> Node:
        if self._node is None:
            self._node = Node.open(self.paths, self.passphrase, schedule=self.schedule)
        return self._node

    def emit(self, doc, text: str | None = None) -> None:
        if self.as_json:
            click.echo(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))
        else:
            click.echo(text if text is not None else json.dumps(doc, indent=2, sort_keys=True))


pass_context = click.make_pass_decorator(Context)


@click.group()
@click.version_option(__version__, prog_name="trace")
@click.option("--config-dir", envvar="TRACE_CONFIG_DIR", default="config", show_default=True)
@click.option("--chain-file", envvar="TRACE_CHAIN_FILE", default="chain.dat", show_default=True)
@click.option("--docstore-dir", envvar="TRACE_DOCSTORE_DIR", default="docstore", show_default=True)
@click.option("--keystore-file", envvar="TRACE_KEYSTORE_FILE", default="keystore.json", show_default=True)
@click.option("--passphrase", envvar="TRACE_KEYSTORE_PASSPHRASE", default="", help="Keystore passphrase.")
@click.option("--gas-schedule", envvar="TRACE_GAS_SCHEDULE", default=None, help="Gas schedule JSON file.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx, config_dir, chain_file, docstore_dir, keystore_file, passphrase, gas_schedule, as_json):
    """Configuration-driven agri-food traceability platform."""
    context = Context()
    context.paths = NodePaths(
        config_dir=Path(config_dir),
        chain_file=Path(chain_file),
        docstore_dir=Path(docstore_dir),
        keystore_file=Path(keystore_file),
    )
    context.passphrase = passphrase
    if gas_schedule:
        context.schedule = GasSchedule.load(gas_schedule)
    context.as_json = as_json
    ctx.obj = context


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


# -- config ------------------------------------------------------------------


@main.group()
def config():
    """Descriptor file management."""


@config.command("validate")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@pass_context
def config_validate(context, directory):
    """Validate the five descriptor files; exit 0 when clean."""
    directory = Path(directory)
    collections = {}
    for kind, filename in DESCRIPTOR_FILENAMES.items():
        try:
            collection = load_descriptor_file(directory / filename)
        except (DescriptorParseError, UnsupportedDescriptorError) as exc:
            _fail(exc.message)
        if collection.kind != kind:
            _fail(f"{filename}: envelope kind {collection.kind!r} does not match file name")
        collections[kind] = collection
    violations = collect_violations(collections)
    doc = {"valid": not violations, "violations": [str(v) for v in violations]}
    if violations:
        context.emit(doc, "\n".join(str(v) for v in violations))
        sys.exit(1)
    context.emit(doc, f"configuration in {directory} is valid")


# -- chain ----------------------------------------------------------------------


@main.group()
def chain():
    """Ledger management."""


@chain.command("init")
@click.option("--base-seed", default=None, help="Derive actor keys deterministically.")
@click.option("--allocation", default=10**9, show_default=True, help="Genesis balance per actor.")
@pass_context
def chain_init(context, base_seed, allocation):
    """Create keys for every configured actor and seal the genesis block."""
    try:
        node = Node.init(
            context.paths,
            context.passphrase,
            base_seed=base_seed,
            allocation=allocation,
            schedule=context.schedule,
        )
    except TraceabilityError as exc:
        _fail(exc.message)
    doc = {
        "chain_id": node.chain.chain_id,
        "actors": {actor: node.address_of(actor) for actor in node.config.actors},
    }
    context.emit(doc, f"chain {node.chain.chain_id} initialized at {context.paths.chain_file}")


@chain.command("verify")
@pass_context
def chain_verify(context):
    """Recompute every hash, signature and state root by replay."""
    try:
        config = load_config_dir(context.paths.config_dir)
    except TraceabilityError as exc:
        _fail(exc.message)
    report = verify_chain_file(
        context.paths.chain_file, build_operations(config), context.schedule
    )
    doc = report.to_doc()
    if report.ok:
        context.emit(doc, f"chain verified: {report.blocks_checked} blocks clean")
    else:
        context.emit(doc, "\n".join(str(f) for f in report.failures))
        sys.exit(1)


@chain.command("gas")
@click.option("--payload", type=int, required=True, help="Payload size in bytes.")
@click.option("--mode", type=click.Choice(["log", "persistent"]), required=True)
@click.option("--topics", type=int, default=1, show_default=True)
@click.option("--updated-slots", type=int, default=0, show_default=True)
@pass_context
def chain_gas(context, payload, mode, topics, updated_slots):
    """Estimate gas for a payload under the storage or log strategy."""
    try:
        gas = estimate_gas(context.schedule, payload, mode, topics=topics, updated_slots=updated_slots)
    except TraceabilityError as exc:
        _fail(exc.message)
    context.emit({"payload": payload, "mode": mode, "gas": gas}, str(gas))


# -- actors -----------------------------------------------------------------------


@main.group()
def actor():
    """Address catalog management."""


@actor.command("register")
@click.option("--as", "as_actor", required=True, help="Administrator actor id signing the change.")
@click.option("--address", required=True)
@click.option("--actor-id", "target_actor", required=True)
@click.option("--roles", default=None, help="Comma-separated roles; defaults to the actor's configured role.")
@click.option("--disable", is_flag=True, help="Register the address as disabled.")
@pass_context
def actor_register(context, as_actor, address, target_actor, roles, disable):
    """Register or update an address binding (administrator only)."""
    args = {"address": address, "actor_id": target_actor, "enabled": not disable}
    if roles:
        args["roles"] = [r.strip() for r in roles.split(",") if r.strip()]
    _run(context, as_actor, ops.OP_REGISTER_ADDRESS, args)


def _run(context: Context, actor_id: str, operation: str, args: dict) -> None:
    try:
        receipt = context.node().execute(actor_id, operation, args)
    except TraceabilityError as exc:
        _fail(exc.message)
    if not receipt.ok:
        context.emit(receipt.to_doc(), f"rejected ({receipt.error_code}): {receipt.error_message}")
        sys.exit(1)
    summary = json.dumps(receipt.result, sort_keys=True)
    context.emit(
        receipt.to_doc(),
        f"ok: block {receipt.block_height}, gas {receipt.gas_used}, {summary}",
    )


# -- resources and events -------------------------------------------------------------


@main.group()
def resource():
    """Productive resources."""


@resource.command("create")
@click.option("--as", "as_actor", required=True)
@click.option("--company", required=True)
@click.option("--kind", "kind_id", required=True)
@click.option("--description", default="")
@click.option("--size", type=int, required=True)
@click.option("--unit", default=None)
@pass_context
def resource_create(context, as_actor, company, kind_id, description, size, unit):
    args = {"company": company, "kind_id": kind_id, "description": description, "size": size}
    if unit:
        args["unit"] = unit
    _run(context, as_actor, ops.OP_CREATE_RESOURCE, args)


def _parse_params(param: tuple[str, ...]) -> dict:
    values = {}
    for item in param:
        if "=" not in item:
            _fail(f"parameter {item!r} must have the form name=value")
        name, _, value = item.partition("=")
        values[name] = value
    return values


@main.group()
def event():
    """Documentation events."""


@event.command("record")
@click.option("--as", "as_actor", required=True)
@click.option("--entity", required=True)
@click.option("--event", "event_kind_id", required=True)
@click.option("--param", multiple=True, help="name=value, repeatable.")
@pass_context
def event_record(context, as_actor, entity, event_kind_id, param):
    args = {"entity": entity, "event_kind_id": event_kind_id, "values": _parse_params(param)}
    _run(context, as_actor, ops.OP_RECORD_EVENT, args)


# -- products ---------------------------------------------------------------------------


@main.group()
def product():
    """Lot transformations."""


@product.command("split")
@click.argument("address")
@click.option("--as", "as_actor", required=True)
@click.option("--parts", required=True, help="Comma-separated part quantities.")
@pass_context
def product_split(context, address, as_actor, parts):
    quantities = [int(part) for part in parts.split(",") if part]
    _run(context, as_actor, ops.OP_SPLIT, {"product": address, "quantities": quantities})


@product.command("merge")
@click.option("--as", "as_actor", required=True)
@click.option("--input", "inputs", multiple=True, required=True)
@click.option("--parts", required=True, help="Comma-separated output quantities.")
@pass_context
def product_merge(context, as_actor, inputs, parts):
    quantities = [int(part) for part in parts.split(",") if part]
    _run(context, as_actor, ops.OP_MERGE, {"inputs": list(inputs), "quantities": quantities})


@product.command("transform")
@click.option("--as", "as_actor", required=True)
@click.option("--event", "event_kind_id", required=True)
@click.option("--input", "inputs", multiple=True, required=True)
@click.option("--output", "outputs", multiple=True, required=True, help="kind:quantity[:unit], repeatable.")
@click.option("--param", multiple=True)
@click.option("--company", default=None, help="Company owning the outputs.")
@pass_context
def product_transform(context, as_actor, event_kind_id, inputs, outputs, param, company):
    parsed_outputs = []
    for item in outputs:
        pieces = item.split(":")
        if len(pieces) not in (2, 3):
            _fail(f"output {item!r} must have the form kind:quantity[:unit]")
        spec = {"kind_id": pieces[0], "quantity": int(pieces[1])}
        if len(pieces) == 3:
            spec["unit"] = pieces[2]
        parsed_outputs.append(spec)
    args = {
        "inputs": list(inputs),
        "event_kind_id": event_kind_id,
        "outputs": parsed_outputs,
        "values": _parse_params(param),
    }
    if company:
        args["company"] = company
    _run(context, as_actor, ops.OP_TRANSFORM, args)


# -- tokens --------------------------------------------------------------------------------


@main.group()
def token():
    """Token ledger."""


@token.command("balances")
@pass_context
def token_balances(context):
    node = _open_node(context)
    world = node.world
    doc = {
        "supply": world.token_supply(),
        "balances": node.chain.state["tokens"],
        "active_product_quantities": world.active_product_quantities(),
    }
    lines = [f"{kind}: total {total}" for kind, total in doc["supply"].items()]
    context.emit(doc, "\n".join(lines) if lines else "no tokens minted")


def _open_node(context: Context) -> Node:
    try:
        return context.node()
    except TraceabilityError as exc:
        _fail(exc.message)


# -- documents ---------------------------------------------------------------------------------


@main.group()
def doc():
    """Content-addressed document store."""


@doc.command("put")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--media-type", default="application/octet-stream", show_default=True)
@pass_context
def doc_put(context, file, media_type):
    store = DocStore(context.paths.docstore_dir)
    try:
        content_id = store.put(Path(file).read_bytes(), media_type=media_type)
    except TraceabilityError as exc:
        _fail(exc.message)
    context.emit({"content_id": content_id}, content_id)


@doc.command("get")
@click.argument("content_id")
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@pass_context
def doc_get(context, content_id, output):
    store = DocStore(context.paths.docstore_dir)
    try:
        content = store.get(content_id)
    except TraceabilityError as exc:
        _fail(exc.message)
    Path(output).write_bytes(content)
    context.emit({"content_id": content_id, "bytes": len(content)}, f"wrote {len(content)} bytes to {output}")


# -- provenance -----------------------------------------------------------------------------------


@main.group(name="trace")
def trace_group():
    """Provenance navigation."""


@trace_group.command("back")
@click.argument("address")
@click.option("--depth", type=int, default=None, help="Limit expansion depth.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text", show_default=True)
@pass_context
def trace_back_cmd(context, address, depth, fmt):
    node = _open_node(context)
    try:
        tree = node.reader.trace_back(address, depth)
    except TraceabilityError as exc:
        _fail(exc.message)
    if context.as_json or fmt == "json":
        context.emit(tree.to_doc())
    else:
        click.echo(render_trace(tree, "text"), nl=False)


@trace_group.command("forward")
@click.argument("address")
@pass_context
def trace_forward_cmd(context, address):
    node = _open_node(context)
    try:
        listing = node.reader.trace_forward(address)
    except TraceabilityError as exc:
        _fail(exc.message)
    text = "\n".join(
        f"{item['address']} {item['kind_id']} {item['quantity']} {item['unit']} ({item['status']})"
        for item in listing
    )
    context.emit({"descendants": listing}, text if listing else "no descendants")


# -- generation ---------------------------------------------------------------------------------------


@main.group()
def generate():
    """Contract and form generation."""


@generate.command("contracts")
@click.argument("config_dir", type=click.Path(exists=True, file_okay=False))
@click.option("-o", "--output", type=click.Path(file_okay=False), required=True)
@click.option("--target", type=click.Choice(["solidity", "markdown"]), default="solidity", show_default=True)
@pass_context
def generate_contracts_cmd(context, config_dir, output, target):
    try:
        config = load_config_dir(config_dir)
    except TraceabilityError as exc:
        _fail(exc.message)
    ir = generate_contract_ir(config)
    files = render_contracts(ir, target)
    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "contract_ir.json").write_text(
        json.dumps(ir.to_doc(), indent=2, sort_keys=True, ensure_ascii=False) + "\n", "utf-8"
    )
    for name, text in files.items():
        (out / name).write_text(text, "utf-8")
    context.emit(
        {"files": sorted([*files, "contract_ir.json"])},
        "\n".join(sorted([*files, "contract_ir.json"])),
    )


@generate.command("forms")
@click.argument("config_dir", type=click.Path(exists=True, file_okay=False))
@click.option("-o", "--output", type=click.Path(file_okay=False), required=True)
@pass_context
def generate_forms_cmd(context, config_dir, output):
    try:
        config = load_config_dir(config_dir)
    except TraceabilityError as exc:
        _fail(exc.message)
    doc = form_schema_doc(generate_all_form_schemas(config))
    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "form_schemas.json"
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8")
    context.emit({"files": [path.name]}, str(path))


# -- service ---------------------------------------------------------------------------------------------


@main.command("serve")
@click.option("--host", envvar="TRACE_HOST", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="TRACE_PORT", default=8420, show_default=True, type=int)
@click.option("--static-dir", envvar="TRACE_STATIC_DIR", default=None, help="Web client bundle to serve at /.")
@pass_context
def serve(context, host, port, static_dir):
    """Run the HTTP API (and optionally the web client)."""
    import uvicorn

    from .api import create_app

    node = _open_node(context)
    app = create_app(node, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()

"""Domain state machines: catalog, events, transformations, tokens, unlocking."""

import dataclasses
import hashlib
import random

import pytest

from agritrace.contracts.params import decode_parameters
from agritrace.ledger import create_account

from conftest import Bed, PHOTO_CID, build_olive_flow


# --- address catalog -----------------------------------------------------------


def test_owner_registers_new_address(bed):
    extra = create_account(seed="extra-device")
    receipt = bed.run_ok(
        "admin",
        "catalog.register",
        {"address": extra.address, "actor_id": "sensor"},
    )
    assert receipt.result["entry"]["roles"] == ["device"]
    assert bed.chain.state["catalog"]["entries"][extra.address]["enabled"]


def test_non_owner_registration_rejected(bed):
    extra = create_account(seed="extra-device")
    receipt = bed.run(
        "miller", "catalog.register", {"address": extra.address, "actor_id": "sensor"}
    )
    assert not receipt.ok
    assert receipt.error_code == "unauthorized"
    assert extra.address not in bed.chain.state["catalog"]["entries"]


def test_disabled_address_cannot_record(bed, flow):
    grower = bed.address("grower1")
    bed.run_ok(
        "admin",
        "catalog.register",
        {"address": grower, "actor_id": "grower1", "enabled": False},
    )
    receipt = bed.run(
        "grower1",
        "event.record",
        {
            "entity": flow["og1"],
            "event_kind_id": "treatment",
            "values": {"product": "copper", "dose_l_per_ha": 1.0, "notes": ""},
        },
    )
    assert not receipt.ok
    assert receipt.error_code == "unauthorized"


def test_reregistration_updates_roles_idempotently(bed):
    grower = bed.address("grower1")
    bed.run_ok(
        "admin",
        "catalog.register",
        {"address": grower, "actor_id": "grower1", "roles": ["producer", "transformer"]},
    )
    entry = bed.chain.state["catalog"]["entries"][grower]
    assert entry["roles"] == ["producer", "transformer"]


# --- resource creation ------------------------------------------------------------


def test_create_resource_starts_active_and_empty(bed):
    receipt = bed.run_ok(
        "grower1",
        "resource.create",
        {
            "company": "Azienda Agricola Su Niu",
            "kind_id": "olive_grove",
            "description": "Olive grove 1",
            "size": 10,
        },
    )
    entity = bed.world.entity(receipt.result["address"])
    assert entity["status"] == "active"
    assert entity["events"] == []
    assert entity["class"] == "R"
    assert "origins" not in entity
    producer = bed.chain.state["producers"][entity["producer"]]
    assert receipt.result["address"] in producer["owned"]


def test_create_resource_rejects_product_kind(bed):
    receipt = bed.run(
        "miller",
        "resource.create",
        {"company": "Frantoio Monte Acuto", "kind_id": "olives", "size": 10},
    )
    assert not receipt.ok
    assert receipt.error_code == "kind-mismatch"


def test_create_resource_rejects_unknown_kind(bed):
    receipt = bed.run(
        "grower1",
        "resource.create",
        {"company": "Azienda Agricola Su Niu", "kind_id": "vineyard", "size": 10},
    )
    assert not receipt.ok
    assert receipt.error_code == "contract"


# --- documentation events ------------------------------------------------------------


def test_recorded_event_round_trips_through_the_log(bed, flow):
    values = {"product": "copper oxychloride", "dose_l_per_ha": 1.5, "notes": "north side"}
    receipt = bed.run_ok(
        "grower1",
        "event.record",
        {"entity": flow["og1"], "event_kind_id": "treatment", "values": values},
    )
    entries = bed.chain.log_entries_for_tx(receipt.tx_hash)
    assert len(entries) == 1
    triples = decode_parameters(entries[0].payload)
    assert triples == [
        ("product", "string", "copper oxychloride"),
        ("dose_l_per_ha", "float", "1.5"),
        ("notes", "text", "north side"),
    ]
    # persistent state keeps the digest, not the payload
    entity = bed.world.entity(flow["og1"])
    event = entity["events"][-1]
    assert event["params_digest"] == hashlib.sha256(entries[0].payload).hexdigest()
    assert "parameters" not in event


def test_type_mismatch_appends_nothing(bed, flow):
    before = len(bed.world.entity(flow["og1"])["events"])
    receipt = bed.run(
        "grower1",
        "event.record",
        {
            "entity": flow["og1"],
            "event_kind_id": "treatment",
            "values": {"product": "copper", "dose_l_per_ha": "abc", "notes": ""},
        },
    )
    assert not receipt.ok
    assert receipt.error_code == "bad-parameter"
    assert len(bed.world.entity(flow["og1"])["events"]) == before


def test_unknown_parameter_name_rejected(bed, flow):
    receipt = bed.run(
        "grower1",
        "event.record",
        {
            "entity": flow["og1"],
            "event_kind_id": "treatment",
            "values": {"product": "x", "dose_l_per_ha": 1.0, "notes": "", "extra": 1},
        },
    )
    assert not receipt.ok
    assert receipt.error_code == "bad-parameter"


def test_event_on_inapplicable_kind_rejected(bed, flow):
    receipt = bed.run(
        "grower1",
        "event.record",
        {
            "entity": flow["olives"],
            "event_kind_id": "treatment",
            "values": {"product": "x", "dose_l_per_ha": 1.0, "notes": ""},
        },
    )
    assert not receipt.ok
    assert receipt.error_code in ("kind-mismatch", "entity-invalidated")


def test_event_on_invalidated_entity_rejected(bed, flow):
    # olives were consumed by the split
    receipt = bed.run(
        "miller",
        "event.record",
        {
            "entity": flow["olives"],
            "event_kind_id": "storage_conditions",
            "values": {"temp_c": 14.0, "humidity_pct": 60.0},
        },
    )
    assert not receipt.ok
    assert receipt.error_code == "entity-invalidated"


# --- transformation -----------------------------------------------------------------


def test_harvest_links_origins_and_produced(bed, flow):
    olives = bed.world.entity(flow["olives"])
    assert olives["origins"] == [flow["og1"], flow["og2"]]
    for grove_address in (flow["og1"], flow["og2"]):
        grove = bed.world.entity(grove_address)
        assert flow["olives"] in grove["produced"]
        assert grove["status"] == "active"  # productive resources survive harvests
    harvest_events = [e for e in olives["events"] if e["event_kind_id"] == "harvest"]
    assert len(harvest_events) == 1


def test_harvest_payload_decodes_to_inputs(bed, flow):
    olives = bed.world.entity(flow["olives"])
    event = next(e for e in olives["events"] if e["event_kind_id"] == "harvest")
    entries = [
        e
        for e in bed.chain.log_entries_for_tx(event["tx_hash"])
        if e.contract == flow["olives"] and e.topic == "harvest"
    ]
    assert decode_parameters(entries[0].payload) == [
        ("kg", "int", "5200"),
        ("variety", "string", "Bosana"),
        ("photo", "hashupload", PHOTO_CID),
    ]


def test_milling_yield_bound_enforced(bed, flow):
    # direct-inequality oracle: 700 > 0.2 * 3000 must be rejected
    assert 700 > 0.2 * 3000
    lot = bed.run_ok(
        "grower1",
        "product.transform",
        {
            "inputs": [flow["og1"]],
            "event_kind_id": "harvest",
            "outputs": [{"kind_id": "olives", "quantity": 3000}],
            "values": {"kg": 3000, "variety": "Bosana", "photo": PHOTO_CID},
        },
    ).result["addresses"][0]
    receipt = bed.run(
        "miller",
        "product.transform",
        {
            "inputs": [lot],
            "event_kind_id": "milling",
            "outputs": [{"kind_id": "olive_oil", "quantity": 700}],
            "values": {
                "process": "cold_extraction",
                "temperature_c": 20.0,
                "datasheet": "https://x.example/d\x1f" + "ee" * 32,
            },
        },
    )
    assert not receipt.ok
    assert receipt.error_code == "conservation"
    assert bed.world.entity(lot)["status"] == "active"


def test_zero_quantity_input_allows_only_zero_output(bed, flow):
    zero_olives = bed.run_ok(
        "grower1",
        "product.transform",
        {
            "inputs": [flow["og1"]],
            "event_kind_id": "harvest",
            "outputs": [{"kind_id": "olives", "quantity": 0}],
            "values": {"kg": 0, "variety": "Bosana", "photo": PHOTO_CID},
        },
    ).result["addresses"][0]
    milling_values = {
        "process": "cold_extraction",
        "temperature_c": 20.0,
        "datasheet": "https://x.example/d\x1f" + "ee" * 32,
    }
    rejected = bed.run(
        "miller",
        "product.transform",
        {
            "inputs": [zero_olives],
            "event_kind_id": "milling",
            "outputs": [{"kind_id": "olive_oil", "quantity": 1}],
            "values": milling_values,
        },
    )
    assert not rejected.ok
    assert rejected.error_code == "conservation"
    accepted = bed.run_ok(
        "miller",
        "product.transform",
        {
            "inputs": [zero_olives],
            "event_kind_id": "milling",
            "outputs": [{"kind_id": "olive_oil", "quantity": 0}],
            "values": milling_values,
        },
    )
    assert bed.world.entity(accepted.result["addresses"][0])["quantity"] == 0


def test_transform_requires_applicable_inputs(bed, flow):
    receipt = bed.run(
        "miller",
        "product.transform",
        {
            "inputs": [flow["oil2"]],
            "event_kind_id": "milling",
            "outputs": [{"kind_id": "olive_oil", "quantity": 1}],
            "values": {
                "process": "cold_extraction",
                "temperature_c": 20.0,
                "datasheet": "https://x.example/d\x1f" + "ee" * 32,
            },
        },
    )
    assert not receipt.ok
    assert receipt.error_code == "kind-mismatch"


# --- split and merge --------------------------------------------------------------------


def test_split_preserves_token_totals(bed, flow):
    # the flow already split 5200 into 3000+2200; totals must match the
    # active product quantities exactly
    assert bed.world.token_supply() == bed.world.active_product_quantities()


def test_split_single_part_relabels_but_invalidates_parent(bed, flow):
    child = bed.run_ok(
        "miller", "product.split", {"product": flow["oil2"], "quantities": [430]}
    ).result["addresses"][0]
    assert bed.world.entity(flow["oil2"])["status"] == "invalidated"
    assert bed.world.entity(child)["quantity"] == 430
    assert bed.world.entity(child)["origins"] == [flow["oil2"]]


def test_split_sum_mismatch_rejected(bed, flow):
    receipt = bed.run(
        "bottler", "product.split", {"product": flow["bottle1"], "quantities": [300, 200]}
    )
    assert not receipt.ok
    assert receipt.error_code == "conservation"
    assert bed.world.entity(flow["bottle1"])["status"] == "active"


def test_split_zero_part_rejected(bed, flow):
    receipt = bed.run(
        "bottler", "product.split", {"product": flow["bottle1"], "quantities": [580, 0]}
    )
    assert not receipt.ok


def test_split_of_invalidated_product_rejected(bed, flow):
    receipt = bed.run(
        "grower1", "product.split", {"product": flow["olives"], "quantities": [5200]}
    )
    assert not receipt.ok
    assert receipt.error_code == "entity-invalidated"


def test_merge_is_inverse_of_split(bed, flow):
    supply_before = bed.world.token_supply()
    parts = bed.run_ok(
        "bottler", "product.split", {"product": flow["bottle1"], "quantities": [200, 380]}
    ).result["addresses"]
    merged = bed.run_ok(
        "bottler", "product.merge", {"inputs": parts, "quantities": [580]}
    ).result["addresses"][0]
    assert bed.world.entity(merged)["quantity"] == 580
    assert bed.world.token_supply() == supply_before
    assert sorted(bed.world.entity(merged)["origins"]) == sorted(parts)


def test_merge_across_kinds_rejected(bed, flow):
    receipt = bed.run(
        "miller", "product.merge", {"inputs": [flow["lot2"], flow["oil2"]], "quantities": [2630]}
    )
    assert not receipt.ok
    # lot2 is already invalidated by the flow; rebuild a live cross-kind pair
    fresh = Bed(bed.config)
    addresses = build_olive_flow(fresh)
    receipt = fresh.run(
        "miller",
        "product.merge",
        {"inputs": [addresses["oil2"], addresses["bottle1"]], "quantities": [1010]},
    )
    assert not receipt.ok
    assert receipt.error_code == "kind-mismatch"


def test_three_way_merge_into_two_outputs_conserves(bed, flow):
    # conservation oracle: plain sums on both sides
    lots = bed.run_ok(
        "miller", "product.split", {"product": flow["oil2"], "quantities": [100, 200, 130]}
    ).result["addresses"]
    receipt = bed.run_ok(
        "miller", "product.merge", {"inputs": lots, "quantities": [350, 80]}
    )
    created = receipt.result["addresses"]
    total_in = 100 + 200 + 130
    total_out = sum(bed.world.entity(a)["quantity"] for a in created)
    assert total_out == total_in
    assert bed.world.token_supply() == bed.world.active_product_quantities()


# --- notarization and asseveration ----------------------------------------------------------


def test_notarize_digest_matches_independent_hash(bed, flow):
    content = b"%PDF-1.4 acidity report"
    digest = hashlib.sha256(content).hexdigest()
    receipt = bed.run_ok(
        "miller",
        "document.notarize",
        {
            "entity": flow["oil2"],
            "digest": digest,
            "locator": f"docstore://{digest}",
            "metadata": [["lab", "string", "LabChem"]],
        },
    )
    event = bed.world.entity(flow["oil2"])["events"][receipt.result["event_index"]]
    assert event["digest"] == digest
    assert event["event_kind_id"] == "notarization"


def test_notarize_by_external_uri_stored_verbatim(bed, flow):
    digest = hashlib.sha256(b"external").hexdigest()
    receipt = bed.run_ok(
        "miller",
        "document.notarize",
        {
            "entity": flow["oil2"],
            "digest": digest,
            "locator": "https://archive.example/report.pdf",
        },
    )
    event = bed.world.entity(flow["oil2"])["events"][receipt.result["event_index"]]
    assert event["locator"] == "https://archive.example/report.pdf"


def test_asseveration_by_lab_appends_certifier(bed, flow):
    digest = hashlib.sha256(b"analysis").hexdigest()
    notarized = bed.run_ok(
        "miller",
        "document.notarize",
        {"entity": flow["oil2"], "digest": digest, "locator": f"docstore://{digest}"},
    )
    index = notarized.result["event_index"]
    bed.run_ok("lab", "record.asseverate", {"entity": flow["oil2"], "event_index": index})
    event = bed.world.entity(flow["oil2"])["events"][index]
    assert len(event["asseverations"]) == 1
    assert event["asseverations"][0]["certifier"] == bed.address("lab")


def test_retailer_cannot_asseverate(bed, flow):
    receipt = bed.run("shop", "record.asseverate", {"entity": flow["bottle1"], "event_index": 0})
    assert not receipt.ok
    assert receipt.error_code == "unauthorized"


def test_double_asseveration_is_history_not_a_set(bed, flow):
    bed.run_ok("lab", "record.asseverate", {"entity": flow["bottle1"], "event_index": 0})
    bed.run_ok("lab", "record.asseverate", {"entity": flow["bottle1"], "event_index": 0})
    event = bed.world.entity(flow["bottle1"])["events"][0]
    assert len(event["asseverations"]) == 2
    assert event["asseverations"][0]["certifier"] == event["asseverations"][1]["certifier"]
    assert event["asseverations"][0]["tx_hash"] != event["asseverations"][1]["tx_hash"]


# --- unlocking ----------------------------------------------------------------------------------


@pytest.fixture
def two_approver_bed(config):
    """Fixture config variant: premium bottling needs cert AND agronomist."""
    event = config.event_kinds["premium_bottling"]
    patched = dataclasses.replace(event, required_unlock_actor_ids=("cert", "agronomist"))
    event_kinds = dict(config.event_kinds)
    event_kinds["premium_bottling"] = patched
    patched_config = dataclasses.replace(config, event_kinds=event_kinds)
    return Bed(patched_config)


def test_locked_transform_requires_unlock(bed, flow):
    receipt = bed.run(
        "bottler",
        "product.transform",
        {
            "inputs": [flow["oil2"]],
            "event_kind_id": "premium_bottling",
            "outputs": [{"kind_id": "bottled_oil", "quantity": 430}],
            "values": {"lot_code": "PREMIUM-1"},
        },
    )
    assert not receipt.ok
    assert receipt.error_code == "locked"


def test_two_of_two_unlock_flow(two_approver_bed):
    bed = two_approver_bed
    flow = build_olive_flow(bed)
    unlock_id = bed.run_ok(
        "bottler",
        "unlock.request",
        {"event_kind_id": "premium_bottling", "target": flow["oil2"]},
    ).result["unlock_id"]

    status = bed.run_ok("cert", "unlock.approve", {"unlock_id": unlock_id}).result["status"]
    assert status == "pending"  # one of two approvals

    outsider = bed.run("shop", "unlock.approve", {"unlock_id": unlock_id})
    assert not outsider.ok
    assert outsider.error_code == "unauthorized"

    status = bed.run_ok("agronomist", "unlock.approve", {"unlock_id": unlock_id}).result["status"]
    assert status == "unlocked"

    transform = bed.run_ok(
        "bottler",
        "product.transform",
        {
            "inputs": [flow["oil2"]],
            "event_kind_id": "premium_bottling",
            "outputs": [{"kind_id": "bottled_oil", "quantity": 430}],
            "values": {"lot_code": "PREMIUM-1"},
        },
    )
    assert transform.ok
    assert bed.chain.state["unlocks"][unlock_id]["status"] == "consumed"

    again = bed.run("cert", "unlock.approve", {"unlock_id": unlock_id})
    assert not again.ok
    assert "consumed" in again.error_message


def test_unlock_request_binds_to_target(two_approver_bed):
    bed = two_approver_bed
    flow = build_olive_flow(bed)
    oil_a, oil_b = bed.run_ok(
        "miller", "product.split", {"product": flow["oil2"], "quantities": [200, 230]}
    ).result["addresses"]
    unlock_id = bed.run_ok(
        "bottler",
        "unlock.request",
        {"event_kind_id": "premium_bottling", "target": oil_a},
    ).result["unlock_id"]
    bed.run_ok("cert", "unlock.approve", {"unlock_id": unlock_id})
    bed.run_ok("agronomist", "unlock.approve", {"unlock_id": unlock_id})
    # an unlock for oil_a opens nothing for oil_b
    wrong_target = bed.run(
        "bottler",
        "product.transform",
        {
            "inputs": [oil_b],
            "event_kind_id": "premium_bottling",
            "outputs": [{"kind_id": "bottled_oil", "quantity": 230}],
            "values": {"lot_code": "WRONG"},
        },
    )
    assert not wrong_target.ok
    assert wrong_target.error_code == "locked"
    right_target = bed.run_ok(
        "bottler",
        "product.transform",
        {
            "inputs": [oil_a],
            "event_kind_id": "premium_bottling",
            "outputs": [{"kind_id": "bottled_oil", "quantity": 200}],
            "values": {"lot_code": "RIGHT"},
        },
    )
    assert right_target.ok


# --- structural invariants -------------------------------------------------------------------------


def _link_consistency(world) -> bool:
    entities = world.state["entities"]
    for address, entity in entities.items():
        for origin in entity.get("origins", []):
            if address not in entities[origin]["produced"]:
                return False
        for child in entity.get("produced", []):
            if address not in entities[child].get("origins", []):
                return False
    return True


def test_bidirectional_link_consistency(bed, flow):
    assert _link_consistency(bed.world)


def test_origins_graph_is_acyclic(bed, flow):
    entities = bed.chain.state["entities"]

    state = {}  # address -> 1 while on stack, 2 when done

    def visit(address) -> bool:
        if state.get(address) == 1:
            return False
        if state.get(address) == 2:
            return True
        state[address] = 1
        for origin in entities[address].get("origins", []):
            if not visit(origin):
                return False
        state[address] = 2
        return True

    assert all(visit(address) for address in entities)


def test_random_split_merge_sequences_conserve_supply(bed, flow):
    rng = random.Random(42)
    world = bed.world
    baseline = world.token_supply()
    for _ in range(100):
        active = [
            (address, entity)
            for address, entity in bed.chain.state["entities"].items()
            if entity["class"] == "P" and entity["status"] == "active" and entity["quantity"] > 1
        ]
        if not active:
            break
        address, entity = rng.choice(active)
        actor = {"olives": "miller", "olive_oil": "miller", "bottled_oil": "bottler", "pomace": "miller"}[
            entity["kind_id"]
        ]
        if rng.random() < 0.7:
            quantity = entity["quantity"]
            cut = rng.randint(1, quantity - 1)
            receipt = bed.run(actor, "product.split", {"product": address, "quantities": [cut, quantity - cut]})
        else:
            candidates = [
                a
                for a, e in active
                if e["kind_id"] == entity["kind_id"] and a != address and e["unit"] == entity["unit"]
            ]
            if not candidates:
                continue
            other = rng.choice(candidates)
            total = entity["quantity"] + bed.world.entity(other)["quantity"]
            receipt = bed.run(actor, "product.merge", {"inputs": [address, other], "quantities": [total]})
        assert receipt.ok, receipt.error_message
        assert bed.world.token_supply() == baseline
        assert bed.world.token_supply() == bed.world.active_product_quantities()

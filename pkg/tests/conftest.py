"""Shared fixtures: the olive-oil deployment in various states."""

from __future__ import annotations

from pathlib import Path

import pytest

from agritrace.config import SupplyChainConfig, load_config_dir
from agritrace.contracts import build_operations
from agritrace.contracts.state import World, genesis_state
from agritrace.crypto import KeyPair
from agritrace.ledger import Chain, Receipt, create_account, make_transaction

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "oliveoil"

GENESIS_BALANCE = 10**9


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def config() -> SupplyChainConfig:
    return load_config_dir(FIXTURE_DIR)


class Bed:
    """A live chain over the fixture config with one account per actor."""

    def __init__(self, config: SupplyChainConfig, path=None, clock=None):
        self.config = config
        self.accounts: dict[str, KeyPair] = {
            actor_id: create_account(seed=f"bed/{actor_id}") for actor_id in config.actors
        }
        bindings = [(kp.address, actor_id) for actor_id, kp in self.accounts.items()]
        state = genesis_state(
            config,
            self.accounts["admin"].address,
            bindings,
            {kp.address: GENESIS_BALANCE for kp in self.accounts.values()},
        )
        self.chain = Chain.create(
            state,
            build_operations(config),
            clock=clock or (lambda: 1_700_000_000),
            path=path,
        )

    @property
    def world(self) -> World:
        return World(self.config, self.chain.state)

    def address(self, actor_id: str) -> str:
        return self.accounts[actor_id].address

    def submit(self, actor_id: str, operation: str, args: dict) -> Receipt:
        keypair = self.accounts[actor_id]
        tx = make_transaction(keypair, self.chain.next_nonce(keypair.address), operation, args)
        return self.chain.submit_transaction(tx)

    def run(self, actor_id: str, operation: str, args: dict) -> Receipt:
        receipt = self.submit(actor_id, operation, args)
        self.chain.seal_block()
        return receipt

    def run_ok(self, actor_id: str, operation: str, args: dict) -> Receipt:
        receipt = self.run(actor_id, operation, args)
        assert receipt.ok, f"{operation} rejected: {receipt.error_code}: {receipt.error_message}"
        return receipt


@pytest.fixture
def bed(config) -> Bed:
    return Bed(config)


PHOTO_CID = "ab" * 32
DATASHEET = "https://mill.example/datasheet\x1f" + "cd" * 32


def build_olive_flow(bed: Bed) -> dict[str, str]:
    """Run the reference production flow: groves -> harvest -> split ->
    per-lot milling -> bottling.  Returns the created addresses."""
    og1 = bed.run_ok(
        "grower1",
        "resource.create",
        {
            "company": "Azienda Agricola Su Niu",
            "kind_id": "olive_grove",
            "description": "Olive grove 1",
            "size": 10,
        },
    ).result["address"]
    og2 = bed.run_ok(
        "grower2",
        "resource.create",
        {
            "company": "Azienda Agricola Su Niu",
            "kind_id": "olive_grove",
            "description": "Olive grove 2",
            "size": 8,
        },
    ).result["address"]
    olives = bed.run_ok(
        "grower1",
        "product.transform",
        {
            "inputs": [og1, og2],
            "event_kind_id": "harvest",
            "outputs": [{"kind_id": "olives", "quantity": 5200}],
            "values": {"kg": 5200, "variety": "Bosana", "photo": PHOTO_CID},
        },
    ).result["addresses"][0]
    lot1, lot2 = bed.run_ok(
        "grower1", "product.split", {"product": olives, "quantities": [3000, 2200]}
    ).result["addresses"]
    oil1 = bed.run_ok(
        "miller",
        "product.transform",
        {
            "inputs": [lot1],
            "event_kind_id": "milling",
            "company": "Frantoio Monte Acuto",
            "outputs": [{"kind_id": "olive_oil", "quantity": 580}],
            "values": {
                "process": "cold_extraction",
                "temperature_c": 24.0,
                "datasheet": DATASHEET,
            },
        },
    ).result["addresses"][0]
    oil2 = bed.run_ok(
        "miller",
        "product.transform",
        {
            "inputs": [lot2],
            "event_kind_id": "milling",
            "company": "Frantoio Monte Acuto",
            "outputs": [{"kind_id": "olive_oil", "quantity": 430}],
            "values": {
                "process": "traditional",
                "temperature_c": 26.5,
                "datasheet": DATASHEET,
            },
        },
    ).result["addresses"][0]
    bottle1 = bed.run_ok(
        "bottler",
        "product.transform",
        {
            "inputs": [oil1],
            "event_kind_id": "bottling",
            "company": "Oleificio Ogliastra",
            "outputs": [{"kind_id": "bottled_oil", "quantity": 580}],
            "values": {
                "lot_code": "LOT-2026-01",
                "bottle_count": 773,
                "spec_sheet": "https://oleificio.example/spec",
            },
        },
    ).result["addresses"][0]
    return {
        "og1": og1,
        "og2": og2,
        "olives": olives,
        "lot1": lot1,
        "lot2": lot2,
        "oil1": oil1,
        "oil2": oil2,
        "bottle1": bottle1,
    }


@pytest.fixture
def flow(bed):
    return build_olive_flow(bed)

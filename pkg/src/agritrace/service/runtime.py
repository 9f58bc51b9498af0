"""Service node: config + chain + document store + keystore wired together.

The node is the one place that signs transactions: callers name an
actor, the node takes that actor's key from the keystore, signs the
operation, submits it and seals a block.  Queries go straight to the
chain state.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..canonical import digest
from ..config import SupplyChainConfig, load_config_dir
from ..contracts import build_operations
from ..contracts.state import World, genesis_state
from ..docstore import DocStore
from ..errors import KeystoreError, TraceabilityError
from ..ledger import Chain, DEFAULT_GAS_SCHEDULE, GasSchedule, Receipt, make_transaction
from ..provenance import TraceReader
from .keystore import Keystore


@dataclass(frozen=True)
class NodePaths:
    config_dir: Path
    chain_file: Path
    docstore_dir: Path
    keystore_file: Path

    @classmethod
    def under(cls, root: str | Path) -> "NodePaths":
        root = Path(root)
        return cls(
            config_dir=root / "config",
            chain_file=root / "chain.dat",
            docstore_dir=root / "docstore",
            keystore_file=root / "keystore.json",
        )


class Node:
    def __init__(
        self,
        config: SupplyChainConfig,
        chain: Chain,
        docstore: DocStore,
        keystore: Keystore,
    ):
        self.config = config
        self.chain = chain
        self.docstore = docstore
        self.keystore = keystore

    # -- lifecycle -------------------------------------------------------

    @classmethod
    def init(
        cls,
        paths: NodePaths,
        passphrase: str,
        base_seed: str | None = None,
        allocation: int = 10**9,
        schedule: GasSchedule = DEFAULT_GAS_SCHEDULE,
        clock: Callable[[], int] | None = None,
    ) -> "Node":
        """Create a fresh deployment: keys for every actor, genesis block.

        With ``base_seed`` set, keys are derived deterministically from
        ``<base_seed>/<actor_id>`` (reproducible fixtures); otherwise
        they are random.
        """
        import os

        config = load_config_dir(paths.config_dir)
        if paths.chain_file.exists():
            raise TraceabilityError(f"chain file already exists at {paths.chain_file}")
        keystore = Keystore.create(paths.keystore_file, passphrase)
        bindings: list[tuple[str, str]] = []
        owner_address = None
        for actor in config.actors.values():
            if base_seed is not None:
                private = digest(f"{base_seed}/{actor.id}".encode("utf-8"))
            else:
                private = os.urandom(32)
            keypair = keystore.put_key(actor.id, private)
            bindings.append((keypair.address, actor.id))
            if owner_address is None and actor.role == "administrator":
                owner_address = keypair.address
        if owner_address is None:
            raise TraceabilityError("configuration defines no administrator actor")
        allocations = {address: allocation for address, _actor in bindings}
        state = genesis_state(config, owner_address, bindings, allocations)
        chain = Chain.create(
            state,
            build_operations(config),
            schedule=schedule,
            clock=clock,
            path=paths.chain_file,
        )
        return cls(config, chain, DocStore(paths.docstore_dir), keystore)

    @classmethod
    def open(
        cls,
        paths: NodePaths,
        passphrase: str,
        schedule: GasSchedule = DEFAULT_GAS_SCHEDULE,
        clock: Callable[[], int] | None = None,
    ) -> "Node":
        config = load_config_dir(paths.config_dir)
        chain = Chain.load(
            paths.chain_file, build_operations(config), schedule=schedule, clock=clock
        )
        keystore = Keystore.open(paths.keystore_file, passphrase)
        return cls(config, chain, DocStore(paths.docstore_dir), keystore)

    # -- views -----------------------------------------------------------

    @property
    def world(self) -> World:
        return World(self.config, self.chain.state)

    @property
    def reader(self) -> TraceReader:
        return TraceReader(self.config, self.chain)

    def address_of(self, actor_id: str) -> str:
        entries = self.chain.state["catalog"]["entries"]
        addresses = sorted(
            address for address, entry in entries.items() if entry["actor_id"] == actor_id
        )
        if not addresses:
            raise KeystoreError(f"no registered address for actor {actor_id!r}")
        return addresses[0]

    def actor_roles(self, actor_id: str) -> list[str]:
        entry = self.chain.state["catalog"]["entries"].get(self.address_of(actor_id))
        return list(entry["roles"]) if entry else []

    # -- transactions ------------------------------------------------------

    def execute(self, actor_id: str, operation: str, args: dict, seal: bool = True) -> Receipt:
        """Sign, submit and (by default) seal one operation as ``actor_id``."""
        keypair = self.keystore.keypair(actor_id)
        nonce = self.chain.next_nonce(keypair.address)
        tx = make_transaction(keypair, nonce, operation, args)
        receipt = self.chain.submit_transaction(tx)
        if seal and receipt.ok:
            self.chain.seal_block()
        return receipt

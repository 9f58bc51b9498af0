"""Configuration-driven agri-food supply-chain traceability platform.

The package is organized around a validated supply-chain configuration
(:mod:`agritrace.config`), a simulated permissioned ledger
(:mod:`agritrace.ledger`), the domain state machines that run on it
(:mod:`agritrace.contracts`), a content-addressed document store
(:mod:`agritrace.docstore`), provenance navigation
(:mod:`agritrace.provenance`), contract/form generation
(:mod:`agritrace.generator`) and the CLI/HTTP surface
(:mod:`agritrace.service`).
"""

__version__ = "0.1.0"

"""Exception hierarchy shared by every module.

Contract-level failures carry a stable ``code`` so the HTTP layer can
forward them verbatim and clients can localize messages.
"""

from __future__ import annotations


class TraceabilityError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# --- configuration layer ---------------------------------------------------


class DescriptorParseError(TraceabilityError):
    """Malformed descriptor file (bad JSON or wrong envelope shape)."""

    code = "descriptor-parse"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class UnsupportedDescriptorError(TraceabilityError):
    """Envelope ``kind`` is not one of the five supported descriptors."""

    code = "unsupported-descriptor"


class ConfigValidationError(TraceabilityError):
    """Cross-reference validation failed; carries the full violation list."""

    code = "config-invalid"

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} configuration violation(s):\n{lines}")


# --- ledger layer ----------------------------------------------------------


class LedgerError(TraceabilityError):
    code = "ledger"


class SignatureError(LedgerError):
    code = "bad-signature"


class NonceError(LedgerError):
    code = "stale-nonce"


class UnknownOperationError(LedgerError):
    code = "unknown-operation"


class ChainStoreError(LedgerError):
    """Chain file is unreadable or structurally corrupt."""

    code = "chain-store"


class GasError(LedgerError):
    code = "gas"


# --- contract layer --------------------------------------------------------


class ContractError(TraceabilityError):
    """Rejection by a domain state machine; leaves state untouched."""

    code = "contract"


class AuthorizationError(ContractError):
    code = "unauthorized"


class UnknownEntityError(ContractError):
    code = "unknown-entity"


class InvalidatedEntityError(ContractError):
    code = "entity-invalidated"


class KindMismatchError(ContractError):
    code = "kind-mismatch"


class ConservationError(ContractError):
    """Token totals would not balance (split/merge) or exceed yield (transform)."""

    code = "conservation"


class LockedError(ContractError):
    code = "locked"


class ParameterError(ContractError):
    """Event parameter failed validation against its declared type."""

    code = "bad-parameter"


class EncodingError(ContractError):
    """Malformed typed-parameter payload."""

    code = "bad-encoding"


class InsufficientFundsError(ContractError):
    code = "insufficient-funds"


# --- document store --------------------------------------------------------


class DocStoreError(TraceabilityError):
    code = "docstore"


class DocumentNotFoundError(DocStoreError):
    code = "document-not-found"


class IntegrityError(DocStoreError):
    """Stored bytes no longer match their content id."""

    code = "integrity"


# --- provenance / service --------------------------------------------------


class TraceQueryError(TraceabilityError):
    code = "trace-query"


class KeystoreError(TraceabilityError):
    code = "keystore"

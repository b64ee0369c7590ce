"""Exception types shared across the package."""


class SalesAssistError(Exception):
    """Base class for all errors raised by this package."""


# --- knowledge base ---

class StorageError(SalesAssistError):
    """The database file could not be created, opened, or locked."""


class SchemaMismatchError(StorageError):
    """An existing store has tables whose columns do not match the expected schema."""


class AlreadySeededError(StorageError):
    """Seed was called on a non-empty store without the overwrite flag."""


class DatasetValidationError(SalesAssistError):
    """A dataset document failed structural validation before insert."""


class ReferentialIntegrityError(DatasetValidationError):
    """A child row references a product id that does not exist."""


class DuplicateProductError(DatasetValidationError):
    """Two products share the same name."""


class SqlRejectedError(SalesAssistError):
    """SQL handed to the read-only executor failed the safety validator."""

    def __init__(self, reason: str):
        super().__init__(f"sql rejected: {reason}")
        self.reason = reason


class QueryError(SalesAssistError):
    """The store reported a runtime error while executing a query."""


class QueryTimeoutError(QueryError):
    """Query execution exceeded the configured time budget."""


# --- providers ---

class ProviderError(SalesAssistError):
    """Base class for external-service failures."""

    def __init__(self, message: str, provider: str = ""):
        super().__init__(message)
        self.provider = provider


class ProviderAuthError(ProviderError):
    """Missing or rejected credentials."""


class ProviderConnectionError(ProviderError):
    """Network-level failure; the operation may be retried."""


class ProviderTimeoutError(ProviderError):
    """The provider did not answer within the request timeout."""


class ProviderProtocolError(ProviderError):
    """The provider answered with a payload we could not interpret."""


class SessionClosedError(ProviderError):
    """Audio was pushed to a closed streaming session."""


class TtsNotConfiguredError(ProviderError):
    """Speech synthesis was requested while the TTS provider is disabled."""


# --- pipeline / demo ---

class ContractViolationError(SalesAssistError):
    """A caller broke an operation precondition (e.g. buffering an interim segment)."""


class RetrievalError(SalesAssistError):
    """Both retrieval strategies failed with hard errors."""


class ScriptValidationError(SalesAssistError):
    """A demo script file does not satisfy the structural invariants."""


class DemoAbortedError(SalesAssistError):
    """The demo engine stopped before the script completed."""

"""Exception hierarchy shared across the package.

The CLI maps each family onto an exit code via ``exit_code``.
"""

from __future__ import annotations


class BibliometricsError(Exception):
    """Base class for every error raised deliberately by this package."""

    exit_code = 5


# -- configuration ----------------------------------------------------------


class ConfigError(BibliometricsError):
    exit_code = 2


class MalformedConfig(ConfigError):
    pass


class MissingField(ConfigError):
    def __init__(self, field: str, institution: str):
        super().__init__(f"missing field {field!r} in institution {institution!r}")
        self.field = field
        self.institution = institution


class MissingCredential(ConfigError):
    pass


# -- data / IO ---------------------------------------------------------------


class IoFailure(BibliometricsError):
    exit_code = 4


class NoSuchDirectory(IoFailure):
    pass


class ParseFailure(BibliometricsError):
    exit_code = 4


# -- metric contracts ---------------------------------------------------------


class PositionOutOfRange(BibliometricsError, ValueError):
    pass


class InvalidAuthorCount(BibliometricsError, ValueError):
    pass


class ComponentExceedsCohortMax(BibliometricsError, ValueError):
    pass


class EmptyPublicationList(BibliometricsError, ValueError):
    pass


class NegativeDrop(BibliometricsError, ValueError):
    """hl exceeded h, which means an upstream metric is wrong."""


class EmptyCorpus(BibliometricsError, ValueError):
    exit_code = 4


class DisciplineNotFound(BibliometricsError, LookupError):
    exit_code = 1


# -- ingestion -----------------------------------------------------------------


class IngestError(BibliometricsError):
    exit_code = 3


class AuthFailure(IngestError):
    exit_code = 2


class QuotaExhausted(IngestError):
    pass


class NoMatch(IngestError):
    pass


class MalformedResponse(IngestError):
    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


class TransportError(IngestError):
    pass

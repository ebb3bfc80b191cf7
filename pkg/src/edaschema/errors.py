"""Exception hierarchy shared by the parsers, schema and store."""

from __future__ import annotations


class EdaSchemaError(Exception):
    """Base class for all package errors."""


class ParseError(EdaSchemaError, ValueError):
    """Malformed interchange input. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.message = message
        self.line = line
        self.source = source
        where = ""
        if source:
            where = source
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class ResolutionError(ParseError):
    """A name (cell, instance, layer, pin) does not resolve."""


class AvailabilityError(EdaSchemaError):
    """An attribute or map was requested or supplied outside its stage window."""


class ValidationError(EdaSchemaError):
    """A snapshot or manifest breaks one of its invariants."""

    def __init__(self, message: str, violations: list | None = None):
        self.violations = list(violations or [])
        super().__init__(message)


class TimingGraphError(EdaSchemaError):
    """A timing path cannot be turned into a well-formed path graph."""


class StoreError(EdaSchemaError):
    """Dataset layout problems: collisions, missing artifacts, digest mismatches."""


class IntegrityError(StoreError):
    """An artifact's SHA-256 digest does not match the manifest."""


class UndefinedError(EdaSchemaError, ValueError):
    """A quantity is undefined for the given input (e.g. HPWL of an unplaced net)."""

"""
Exception hierarchy shared by the services, the CLI and the HTTP layer.

Each class maps to one exit code / status code at the outer surfaces.
"""

from typing import Iterable, List, Optional


class QuasibosonError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QuasibosonError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(QuasibosonError, IndexError):
    """An index or level lies outside the available range."""


class ContractError(QuasibosonError, ValueError):
    """A precondition of an operation does not hold."""


class CapacityError(QuasibosonError):
    """A requested Fock space exceeds the configured dimension cap."""


class EmptySolutionError(QuasibosonError):
    """The block capacity n_modes * m exceeds min(d_a, d_b)."""


class NotCoveredError(QuasibosonError, KeyError):
    """A closed form was requested for a pattern that has none."""

    def __str__(self) -> str:
        return self.args[0] if self.args else ""


class ConfigError(QuasibosonError):
    """
    Inconsistent or malformed run configuration.

    Args:
        message: Human-readable description
        fields: Names of the offending configuration fields
    """

    def __init__(self, message: str, fields: Optional[Iterable[str]] = None):
        super().__init__(message)
        self.fields: List[str] = list(fields or [])

    def __str__(self) -> str:
        base = super().__str__()
        if self.fields:
            return f"{base} (fields: {', '.join(self.fields)})"
        return base

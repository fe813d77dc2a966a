"""Exception types shared across the library."""

from __future__ import annotations


class TwistlabError(Exception):
    """Base class for all twistlab errors."""


class DimensionMismatchError(TwistlabError):
    """Operands do not share a compatible shape or block structure."""


class BracketError(TwistlabError):
    """A root bracket could not be established for a scalar solve."""


class WitnessDivergence(TwistlabError):
    """A witness search failed to converge.

    Carries a ``diagnostics`` dict (iterations, residuals, last iterate)
    so callers can record the failure without re-running the search.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InversionRefusedError(TwistlabError):
    """Inversion is not defined for the given map.

    For diagonal maps this names the offending coordinates (where the
    multiplier vanishes, i.e. the weight equals one).
    """

    def __init__(self, message: str, coordinates: list[int] | None = None):
        super().__init__(message)
        self.coordinates = coordinates or []


class UnsupportedMapError(TwistlabError):
    """The requested check is only defined for a restricted map class."""


class UnknownMapError(TwistlabError):
    """A map name is not present in the catalog registry."""

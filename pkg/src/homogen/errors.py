"""Exception hierarchy and the small verdict type shared by predicates."""
from __future__ import annotations

from typing import Any, NamedTuple


class HomogenError(Exception):
    exit_code = 1


class InputError(HomogenError, ValueError):
    """Malformed input or a violated precondition."""

    exit_code = 2


class CapacityError(HomogenError):
    """A configured size cap (group order, enumeration size, budget) was hit."""

    exit_code = 3


class IntegrityError(HomogenError):
    """A construction that is guaranteed to succeed did not.

    Raised only when a checked theorem-consequence fails; treat as a bug
    or as a counterexample to the underlying mathematics.
    """

    exit_code = 4


class ConstructionError(InputError):
    """A construction was asked for where its precondition fails."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class Verdict(NamedTuple):
    """Boolean outcome plus a witness (counterexample or certificate)."""

    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok

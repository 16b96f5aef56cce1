"""Exception types and the small verdict object returned by checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class MorseError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MorseError, ValueError):
    """An argument violates an operation's precondition."""


class IntegrityError(MorseError):
    """A computed object contradicts a guaranteed identity.

    Raised instead of returning a number that cannot be trusted, e.g. when a
    supposed fundamental cycle has a coefficient other than +1/-1.
    """


class CollapseError(MorseError):
    """Greedy collapsing got stuck before reaching the target subcomplex."""

    def __init__(self, message: str, remaining: Any = None):
        super().__init__(message)
        self.remaining = remaining


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome of a check plus the evidence for a negative answer."""

    ok: bool
    reason: str = ""
    witness: Any = field(default=None, compare=False)

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls) -> "Verdict":
        return cls(True)

    @classmethod
    def failed(cls, reason: str, witness: Any = None) -> "Verdict":
        return cls(False, reason, witness)

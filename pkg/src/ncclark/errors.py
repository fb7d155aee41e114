"""Error taxonomy shared by every module.

All failures raised on purpose derive from :class:`NcclarkError` so callers
(and the CLI) can distinguish domain problems from plain bugs.
"""

from __future__ import annotations


class NcclarkError(Exception):
    """Base class for all package errors."""


class ArityError(NcclarkError):
    """A word letter or variable index does not fit the declared arity."""


class DomainError(NcclarkError):
    """Evaluation left the domain: a pencil or inverse is (numerically) singular.

    Carries ``cond``, the condition estimate that triggered the failure,
    when one is available.
    """

    def __init__(self, message: str, cond: float | None = None):
        super().__init__(message)
        self.cond = cond


class PreconditionError(NcclarkError):
    """A documented precondition of the operation does not hold."""


class RegularityError(NcclarkError):
    """An expression or realization is not regular at zero (D = 0 inverse)."""


class IterationError(NcclarkError):
    """A fixed-point iteration failed to converge within its budget."""


class HeuristicError(NcclarkError):
    """A randomized routine could not verify its own output."""


class ParseError(NcclarkError):
    """Syntax error in an expression string; ``position`` is 0-based."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position

"""Exception types. Everything a caller can trigger with bad input derives
from :class:`DomainError`; the CLI maps those to exit code 2."""


class DomainError(ValueError):
    pass


class NotPrimePower(DomainError):
    pass


class SizeOverflow(DomainError):
    pass


class CharTooSmall(DomainError):
    pass


class AmbientMismatch(DomainError):
    pass


class EmptyHypergraph(DomainError):
    pass


class HypergraphTooLarge(DomainError):
    pass


class QTooSmall(DomainError):
    pass


class ParameterRangeError(DomainError):
    pass


class PreconditionFailed(DomainError):
    pass


class TooSmall(DomainError):
    pass


class TooLarge(DomainError):
    pass


class DegenerateShell(DomainError):
    pass


class ParseError(DomainError):
    pass


class BudgetExhausted(RuntimeError):
    """Search hit its node budget. ``incumbent`` holds the best result so far."""

    def __init__(self, message, incumbent=None):
        super().__init__(message)
        self.incumbent = incumbent

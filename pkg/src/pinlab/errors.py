"""Exception types shared across the package."""


class PinlabError(Exception):
    """Base class for all package errors."""


class InvalidLawError(PinlabError, ValueError):
    """A law specification is malformed or an operation refuses this law."""


class MomentError(PinlabError, ValueError):
    """An exponential moment required by the operation is infinite."""


class BudgetError(PinlabError, RuntimeError):
    """A size/replica budget would be exceeded."""


class InconclusiveError(PinlabError, RuntimeError):
    """A statistical procedure could not reach a conclusion at the given budget."""

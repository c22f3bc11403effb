class IrsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(IrsError, ValueError):
    pass


class DegenerateChannelError(IrsError, ValueError):
    """The effective channel (or an input vector) is identically zero."""


class EmptyIrsError(IrsError, ValueError):
    """An operation needs at least one reflecting element but M == 0."""


class ContractViolation(IrsError, ValueError):
    """An input breaks a documented precondition (e.g. unit modulus)."""


class OracleSizeError(IrsError, ValueError):
    """Exhaustive enumeration would exceed the configured size guard."""

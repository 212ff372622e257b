class AdqError(Exception):
    """Base class for workbench errors."""


class DomainError(AdqError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class BoundsError(AdqError, ValueError):
    """Malformed or out-of-range limits."""


class CapabilityError(AdqError):
    """The elimination engine cannot handle a constraint within its configured caps."""


class PreconditionError(AdqError):
    """A replay was asked to run without its required prior verification."""

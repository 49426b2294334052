"""Exception types shared by all modules."""


class BegError(Exception):
    """Base class for toolkit errors."""


class DomainError(BegError, ValueError):
    """An argument lies outside the operation's domain."""


class ResourceError(BegError):
    """An enumeration would exceed its configured size cap."""


class NoRootError(DomainError):
    """The requested equation has no solution in the search interval."""


class InvariantViolation(BegError):
    """A checked mathematical invariant failed."""

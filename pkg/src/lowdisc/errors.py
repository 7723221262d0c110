"""Exception types shared across the package."""


class LowdiscError(Exception):
    """Base class for all package-specific errors."""


class ContractViolationError(LowdiscError, ValueError):
    """An input violates a documented precondition (domain, shape, pairing)."""


class NumericalError(LowdiscError, ArithmeticError):
    """A numerical routine failed to meet its consistency tolerance."""


class SizeRefusalError(LowdiscError, ValueError):
    """Request refused because it would blow up combinatorially."""

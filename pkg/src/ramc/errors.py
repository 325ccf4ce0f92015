"""Exception types shared across the package."""


class RamcError(Exception):
    """Base class for all package errors."""


class DomainError(RamcError, ValueError):
    """An argument lies outside the domain of a function."""


class ScopeError(DomainError):
    """Parameters fall outside the range a theorem-level routine accepts."""


class UnsupportedOrderError(DomainError):
    """A polygamma order other than 1, 2 or 3 was requested."""


class SizeError(RamcError, ValueError):
    """A requested sequence length exceeds the configured cap."""


class ConvergenceError(RamcError, ArithmeticError):
    """A series or iteration failed to converge within its budget."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature could not meet its tolerance."""

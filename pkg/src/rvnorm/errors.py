"""Exception types shared across the package."""


class RVNormError(Exception):
    """Base class for all errors raised by rvnorm."""


class DomainError(RVNormError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class MomentError(DomainError):
    """A required absolute moment of the entry distribution does not exist."""


class ConvergenceError(RVNormError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class ParseError(RVNormError, ValueError):
    """Input text (distribution grammar, matrix file, config) is malformed."""

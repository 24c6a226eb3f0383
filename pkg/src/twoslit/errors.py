"""Exception types shared across the package.

Two families matter operationally: bad or out-of-contract input
(ValidationError) and data-dependent numerical breakdown
(DegeneracyError). The CLI maps them to distinct exit codes.
"""


class TwoSlitError(Exception):
    """Base class for all package errors."""


class ValidationError(TwoSlitError, ValueError):
    """Input violates a precondition: wrong shape, degenerate operands,
    ill-posed configuration known before any numerics run."""


class DegeneracyError(TwoSlitError, ArithmeticError):
    """A numerically degenerate situation discovered while computing:
    rank collapse, vanishing pivot, no usable solution branch."""

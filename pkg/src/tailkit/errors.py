"""Exception types shared across the toolkit.

ValidationError covers bad inputs (malformed files, out-of-range
parameters, violated preconditions); ComputationError covers numerical
failures (rank-deficient systems, non-converged solves, missing root
brackets). The CLI maps them to exit codes 1 and 2 respectively.
"""


class ValidationError(ValueError):
    """Input or parameter failed validation."""


class ComputationError(RuntimeError):
    """A numerical routine could not produce a valid result."""

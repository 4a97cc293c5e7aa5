# quadwish/errors.py

"""
Exception hierarchy for quadwish.

Every error carries a short ``category`` string. The CLI prints it to the
diagnostic stream and exits non-zero, so callers can tell a bad flag from
a numerical breakdown without parsing messages.
"""

from __future__ import annotations


class QuadwishError(Exception):
    """Base class for all quadwish errors."""

    category = "error"


class InvalidDimensionError(QuadwishError, ValueError):
    """A dimension is out of range (e.g. n = 0) or a matrix is not square."""

    category = "invalid-dimension"


class InvalidParameterError(QuadwishError, ValueError):
    """A parameter violates a precondition (shape mismatch, rank, cond < 1, ...)."""

    category = "invalid-parameter"


class SizeCapError(InvalidParameterError):
    """The Kronecker path was asked for a dimension above its configured cap."""

    category = "size-cap"


class CaseMismatchError(QuadwishError, ValueError):
    """A special-case formula was requested whose preconditions do not hold."""

    category = "case-mismatch"


class NumericalFailureError(QuadwishError, ArithmeticError):
    """A factorisation failed or produced an unusable result."""

    category = "numerical-failure"


class DivergenceError(QuadwishError, ArithmeticError):
    """An SGD trajectory left the finite region."""

    category = "divergence"

    def __init__(self, iteration: int, norm: float) -> None:
        self.iteration = iteration
        self.norm = norm
        super().__init__(f"iterate diverged at iteration {iteration} (|x| = {norm:.3e})")


class ExperimentConfigError(QuadwishError, ValueError):
    """An experiment configuration is inconsistent."""

    category = "config"

"""Shared exception types."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class InvalidPlanformError(ValueError):
    """A planform violates its geometric invariants (negative chord, zero span, ...)."""


class CalibrationRangeError(ValueError):
    """A lookup query falls outside the convex hull of a calibration grid."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to reach its tolerance."""

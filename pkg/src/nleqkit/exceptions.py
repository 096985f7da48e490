"""Exception types shared across the toolkit."""


class NleqkitError(Exception):
    """Base class for all toolkit errors."""


class UnknownProblemError(NleqkitError, KeyError):
    """Raised when a problem id or registry name is not recognized."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unrecognized problem: {self.name!r}"


class DimensionError(NleqkitError, ValueError):
    """Raised when a vector or matrix has the wrong shape."""


class SingularMatrixError(NleqkitError, RuntimeError):
    """Linear solve hit a pivot below the singularity threshold."""

    def __init__(self, pivot: float, threshold: float):
        super().__init__(f"matrix numerically singular: |pivot|={pivot:.3e} "
                         f"below threshold {threshold:.3e}")
        self.pivot = pivot
        self.threshold = threshold


class SingularStepError(NleqkitError, RuntimeError):
    """A Newton or Gauss-Newton step could not be formed."""


class DegenerateStepError(NleqkitError, ValueError):
    """A secant update was requested with a zero step."""


class EvaluationError(NleqkitError, RuntimeError):
    """A residual/objective evaluation returned non-finite values.

    Carries the point at which evaluation failed and, for finite-difference
    columns, the parameter index being perturbed.
    """

    def __init__(self, message: str, x=None, column: int | None = None):
        super().__init__(message)
        self.x = x
        self.column = column

"""Exception types raised across the package."""


class CartanFlowError(Exception):
    """Base class for all package errors."""


class StructureError(CartanFlowError, ValueError):
    """Malformed input: wrong shapes, bad file contents, unknown names."""


class ValidationError(CartanFlowError):
    """Structure constants fail antisymmetry or Jacobi at the requested tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PreconditionError(CartanFlowError):
    """An operation was called on input outside its domain."""


class InvariantViolation(CartanFlowError, AssertionError):
    """A property that holds as a theorem failed numerically.

    This always indicates a bug (or a tolerance set below the float noise
    floor), never a property of the input.
    """


class DegenerateDirection(CartanFlowError):
    """A tangent direction has no usable eigenvalue separation."""


class StalledFlow(CartanFlowError):
    """Backtracking could not find a decreasing step."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InconclusiveDestabilization(CartanFlowError):
    """No candidate subspace from a boundary flag passed the ideal test."""


class NotCriticalPoint(PreconditionError):
    """A metric handed to the Cartan split is not a critical point of F."""


class DegenerateInvolution(InvariantViolation):
    """The recovered involution has eigenvalues away from +1 and -1."""


class InclusionFailure(InvariantViolation):
    """A bracket of split pieces leaves the subspace it should land in."""

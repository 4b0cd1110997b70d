"""Exception hierarchy. Every error carries enough context to locate the failure."""


class QuadCurvError(Exception):
    """Base class for all errors raised by quadcurv."""


class ArgumentError(QuadCurvError, ValueError):
    """Bad argument: dimension mismatch, wrong symmetry class, out-of-range n."""


class GeometryError(QuadCurvError):
    """A sampled metric is not positive definite."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DomainError(QuadCurvError):
    """Evaluation requested outside a chart's safe interior."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class UnsupportedDimensionError(QuadCurvError):
    """The requested identity or quantity is vacuous in this dimension."""


class PreconditionError(QuadCurvError):
    """An operation's applicability gate failed. ``gate`` names it."""

    def __init__(self, message, gate=None):
        super().__init__(message)
        self.gate = gate


class CapabilityError(QuadCurvError):
    """The model cannot supply the derivative depth an operation needs."""


class BoundaryError(QuadCurvError):
    """A restricted search left the validity domain of its metric family."""


class ConstructionError(QuadCurvError):
    """A model could not be built (e.g. perturbation destroys positivity)."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point

"""Exception hierarchy shared by all recoflow modules."""


class RecoflowError(Exception):
    """Base class for every error raised by recoflow."""


class BoundsError(RecoflowError, ValueError):
    """An argument lies outside the supported range."""


class ValidityError(RecoflowError, ValueError):
    """A structural invariant (disjointness, coverage, normalisation) fails."""


class DimensionError(RecoflowError, ValueError):
    """Operands live on different carriers or site sets."""


class ArityError(RecoflowError, ValueError):
    """A parent tuple does not match the number of blocks."""


class OrderError(RecoflowError, ValueError):
    """A refinement precondition A <= B is violated."""


class DomainError(RecoflowError, ValueError):
    """A scalar argument is outside the function's domain."""


class BoundaryError(RecoflowError, ValueError):
    """A quantity is undefined on the boundary of the simplex."""


class DegenerateInputError(RecoflowError, ValueError):
    """The recombination rates do not support any splitting event."""


class SymmetryError(RecoflowError, ValueError):
    """A matrix expected to be symmetric is not."""


class MonotonicityError(RecoflowError, ValueError):
    """A rate matrix has a positive rate that does not increase the potential."""


class HorizonError(RecoflowError, ValueError):
    """Sampled paths do not reach the requested time."""


class ResourceError(RecoflowError):
    """The requested computation exceeds the desk-scale work bound."""


class ReversibilityError(RecoflowError):
    """A non-void reaction has no backward partner."""


class IntegrationError(RecoflowError):
    """A fixed-step integration left the simplex."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConfigError(RecoflowError, ValueError):
    """A run configuration is malformed."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

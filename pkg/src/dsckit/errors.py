"""Exception hierarchy shared by every dsckit module."""


class DSCError(Exception):
    """Base class for all dsckit errors."""


class ParameterDomainError(DSCError, ValueError):
    """A parameter lies outside its admissible range."""


class UnsupportedOrderError(DSCError, ValueError):
    """Derivative order outside the supported range 0..4."""


class UnsupportedFamilyError(DSCError, ValueError):
    """The operation is not defined for the requested kernel family."""


class UnderResolvedError(DSCError, ValueError):
    """The grid cannot resolve the requested band limit (B * delta >= pi)."""


class DegenerateBoundaryError(DSCError, ArithmeticError):
    """Boundary extension coefficients have a vanishing denominator."""


class DomainError(DSCError, ValueError):
    """Evaluation point lies outside the grid hull."""


class NumericFailure(DSCError, RuntimeError):
    """A dense linear-algebra routine failed or returned an unusable result."""


class GeometryError(DSCError, ValueError):
    """The interior mask is empty or disconnected."""


class DivergenceError(DSCError, RuntimeError):
    """Time integration blew up.

    Attributes
    ----------
    time : float
        Simulation time at which the blow-up was detected.
    """

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class ArgumentError(DSCError, ValueError):
    """A call received an unusable argument (empty schedule, bad shape)."""


class UnsupportedBoundaryError(DSCError, ValueError):
    """The boundary condition has no exact extension coefficients."""

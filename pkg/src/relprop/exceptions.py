"""Exception and warning types raised by :mod:`relprop`."""


class RelpropError(Exception):
    """Base class for every error raised by the package."""


class DomainError(RelpropError, ValueError):
    """An argument lies outside the domain of the requested function."""


class SingularityError(RelpropError, ValueError):
    """The function has a non-removable singularity at the requested point."""


class LightConeSingularity(SingularityError):
    """A propagator was queried on (or within the exclusion band of) the light cone."""


class ConvergenceError(RelpropError, ArithmeticError):
    """A numerical procedure exhausted its budget before reaching tolerance.

    The best available estimate is attached as ``partial`` when one exists.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DecayError(ConvergenceError):
    """A semi-infinite integrand did not decay as promised by its rate hint."""


class AccelerationError(ConvergenceError):
    """Partial sums of an oscillatory tail were not eventually alternating."""


class PoleSeparationError(RelpropError, ValueError):
    """Principal-value poles are too close to each other or to an endpoint."""


class SignCalibrationError(RelpropError, ArithmeticError):
    """Two representations that should agree up to sign disagree in magnitude."""


class GridError(RelpropError, ValueError):
    """A spatial grid is malformed or does not cover the required support."""


class UnderflowWarning(RuntimeWarning):
    """A result underflowed to zero in double precision."""

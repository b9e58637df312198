"""Exception types shared across the package."""


class PseudofrontError(Exception):
    """Base class for all errors raised by this package."""


class NumericalFailure(PseudofrontError):
    """A numerical stage could not meet its accuracy contract."""

    def __init__(self, message, location=None):
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)
        self.location = location


class DetDrift(NumericalFailure):
    """A group-valued loop drifted away from determinant one."""


class TailOverflow(NumericalFailure):
    """Truncated Laurent tails exceeded the configured budget."""


class IllConditioned(NumericalFailure):
    """The Birkhoff linear system is too badly conditioned to trust."""


class PreconditionError(PseudofrontError):
    """Input data violates a mathematical precondition."""


class InvalidCharacteristicData(PreconditionError):
    """Data for the characteristic construction violates its conditions."""


class DegenerateCurve(PreconditionError):
    """A space curve has (numerically) vanishing speed."""


class UnknownCurve(PseudofrontError, KeyError):
    """Requested named curve does not exist."""


class DomainError(PseudofrontError, ValueError):
    """A function was evaluated outside its domain."""


class NotOnSingularSet(PseudofrontError):
    """A point handed to the classifier is not a singular point."""


class DegenerateConfiguration(PseudofrontError):
    """Point cloud is too degenerate for rigid alignment."""

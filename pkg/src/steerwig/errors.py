"""Exception hierarchy for steerwig."""


class SteerwigError(ValueError):
    """Base class for all domain errors raised by the package."""


class DimensionError(SteerwigError):
    pass


class SingularMarginalError(SteerwigError):
    """Raised when a 2x2 marginal is (numerically) not invertible."""


class DecompositionDomainError(SteerwigError):
    pass


class NotSymplecticError(SteerwigError):
    pass


class ModeOverlapError(SteerwigError):
    pass


class NormalizationError(SteerwigError):
    pass


class UnphysicalStateError(SteerwigError):
    pass


class NoPhotonError(SteerwigError):
    """The subtraction mode carries no photons, so subtraction is undefined."""


class UndefinedMinimumError(SteerwigError):
    """The displaced minimum of the subtracted Wigner function has no closed form."""


class GraphFormatError(SteerwigError):
    pass


class InsufficientCutoffError(SteerwigError):
    """Fock truncation leaks more population than the configured bound."""

    def __init__(self, message, leakage=None):
        super().__init__(message)
        self.leakage = leakage

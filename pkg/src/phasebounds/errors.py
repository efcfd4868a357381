"""Exception types raised across the package."""


class PhaseBoundsError(ValueError):
    """Base class for all domain errors."""


class NotHermitian(PhaseBoundsError):
    pass


class NoConvergence(PhaseBoundsError, ArithmeticError):
    pass


class NotNormalized(PhaseBoundsError):
    pass


class SizeExceeded(PhaseBoundsError):
    pass


class DimensionMismatch(PhaseBoundsError):
    pass


class DegenerateSpectrum(PhaseBoundsError):
    pass


class NegativeEigenvalue(PhaseBoundsError):
    pass


class SupportViolation(PhaseBoundsError):
    pass


class ZeroVariance(PhaseBoundsError):
    pass


class UnknownPreset(PhaseBoundsError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class BadParameters(PhaseBoundsError):
    pass


class DegenerateComponent(PhaseBoundsError):
    pass


class GridTooCoarse(PhaseBoundsError):
    pass


class InsufficientSamples(PhaseBoundsError):
    pass


class SpecParseError(PhaseBoundsError):
    """Malformed state/generator/scheme spec; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key

"""Exception types shared across the package."""


class MzFisherError(Exception):
    """Base class for all package-specific errors."""


class CutoffOverflow(MzFisherError):
    """Required Fock cutoff exceeds the configured hard maximum."""


class ZeroProbability(MzFisherError):
    """Conditioning on an event that occurs with probability zero."""


class SizeExceeded(MzFisherError):
    """Rotation block requested beyond the numerical-stability ceiling."""


class DomainError(MzFisherError):
    """Closed-form expression evaluated outside its domain of validity."""


class DegenerateLikelihood(MzFisherError):
    """Likelihood carries no phase information (e.g. only overflow clicks)."""


class InsufficientData(MzFisherError):
    """Not enough data points for the requested fit."""

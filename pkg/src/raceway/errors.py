"""Exception hierarchy for the raceway package."""


class RacewayError(Exception):
    """Base class for all raceway-specific errors."""


class NonPositiveHeight(RacewayError):
    """Water height evaluated to a non-positive value."""


class NegativeLight(RacewayError):
    """Photon flux density must be non-negative."""


class AboveSurface(RacewayError):
    """A vertical position lies above the free surface."""


class StepBlowup(RacewayError):
    """A trajectory left the water column during integration."""


class NonProgress(RacewayError):
    """Horizontal velocity dropped to zero or below; the lap cannot complete."""


class GridMismatch(RacewayError):
    """Forward traces do not share a common time grid."""


class SubcriticalViolation(RacewayError):
    """A shape fails the minimum-height (subcritical flow) requirement."""


class InvalidInitialGuess(RacewayError):
    """The optimizer's starting shape is not subcritical."""


class ConfigError(RacewayError):
    """Base class for configuration problems."""


class ParseError(ConfigError):
    """Config file could not be parsed; carries line information."""


class ValidationError(ConfigError):
    """A config value failed validation; names the offending key."""

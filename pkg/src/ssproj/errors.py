"""Exception types shared across the package."""


class SSProjError(Exception):
    """Base class for all package errors."""


class DegenerateSpan(SSProjError):
    """Vectors are numerically dependent."""


class DimensionMismatch(SSProjError, ValueError):
    pass


class FullSpace(SSProjError):
    """Orthocomplement requested for a plane equal to the whole space."""


class WordTooShort(SSProjError):
    """Truncated coding-map error bound exceeds the requested tolerance."""


class ExplosionGuard(SSProjError):
    """A cut-set would exceed the configured size cap."""


class ZeroVector(SSProjError, ValueError):
    pass


class DegenerateOsculation(SSProjError):
    """The first k derivatives of a curve are dependent at a parameter."""


class NotUnitSpeed(SSProjError):
    pass


class VanishingCurvature(SSProjError):
    pass


class InsufficientScales(SSProjError):
    """Fewer than four usable scales in the fit window."""


class OutsideSupport(SSProjError):
    pass


class MissingSeries(SSProjError):
    """A report lacks the data series needed by a plot."""


class ConfigError(SSProjError, ValueError):
    pass

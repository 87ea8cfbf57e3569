"""
Error taxonomy for the simulator.

Every error derives from ValueError as well, so callers written against
plain ValueError keep working.
"""


class KpoError(ValueError):
    """Base class for all simulator errors."""


class InvalidDimensionError(KpoError):
    """Truncation size invalid, dims mismatched or composite input rejected."""


class ZeroVectorError(KpoError):
    """A state construction produced the null vector."""


class ScheduleRangeError(KpoError):
    """A pulse schedule was evaluated outside [0, T]."""


class IntegrationDivergedError(KpoError):
    """Norm drift exceeded the configured limit during time stepping."""


class UnidentifiableAngleError(KpoError):
    """The rotation angle cannot be recovered from the given states."""


class UnknownGateError(KpoError):
    """Gate or protocol kind not supported."""


class ConfigError(KpoError):
    """Sweep configuration failed validation or could not be parsed."""

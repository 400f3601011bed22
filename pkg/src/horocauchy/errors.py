"""Exception types shared across the package."""


class HorocauchyError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(HorocauchyError, ValueError):
    """A constructed object violates one of its defining constraints."""


class DomainError(HorocauchyError):
    """An evaluation point lies outside the domain where the operation is defined."""


class NumericalError(HorocauchyError):
    """A computation produced non-finite values or failed to converge."""


class FeatureError(HorocauchyError, NotImplementedError):
    """A parameter combination is outside the supported feature set."""


class ConfigError(HorocauchyError, ValueError):
    """An experiment configuration document is malformed."""

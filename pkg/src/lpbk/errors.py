"""Exception hierarchy shared by every lpbk module."""


class LPBKError(Exception):
    """Base class for all toolkit errors."""


class InvalidParams(LPBKError, ValueError):
    """A parameter is outside the range an operation accepts."""


class GridMismatch(LPBKError, ValueError):
    """Two fields that must share a grid do not."""


class InconsistentPartials(LPBKError, ValueError):
    """A partial-derivative set fails its cross-derivative compatibility."""


class ValidationFailure(LPBKError):
    """Constant fitting produced a bound that the validation family violates."""


class ConfigError(LPBKError, ValueError):
    """A job configuration document does not match the published schema."""

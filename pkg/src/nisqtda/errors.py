class NisqTdaError(Exception):
    """Base class for errors raised by this package."""


class ScaleCapError(NisqTdaError, ValueError):
    """Problem size exceeds a configured simulator or oracle cap."""


class EmptyComplexError(NisqTdaError, ValueError):
    """The complex has no simplices at the requested order."""


class ConfigError(NisqTdaError, ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field

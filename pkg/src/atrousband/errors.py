"""Exception types shared across the package."""


class AtrousError(Exception):
    """Base class for every error raised by atrousband."""


class InvalidArgument(AtrousError, ValueError):
    pass


class UnsupportedSampleRate(AtrousError, ValueError):
    pass


class UnsupportedFormat(AtrousError):
    pass


class CorruptFile(AtrousError):
    pass


class SilentInput(AtrousError, ValueError):
    """Raised when an energy normalizer is zero (nothing to weight)."""

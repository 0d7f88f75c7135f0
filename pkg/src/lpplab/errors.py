"""Exception types shared across the package."""


class LppLabError(Exception):
    """Base class for all package errors."""


class NoAdmissiblePath(LppLabError):
    """No up-right path exists from the start set to the end point.

    Raised instead of returning an infinite sentinel, so that blocked or
    unreachable configurations cannot silently poison statistics.
    """


class MissingPath(LppLabError):
    """An operation needed the maximizing path but the result has none."""


class BufferExhausted(LppLabError):
    """The finite-volume truncation may have contaminated observed labels."""


class ConfigError(LppLabError):
    """An experiment configuration is malformed or out of domain."""

"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument lies outside the documented domain of an operation."""


class InsufficientData(ValueError):
    """Too few samples (or too narrow a span) for a statistical fit."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""

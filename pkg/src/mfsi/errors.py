"""Exception types shared across the package."""


class MfsiError(Exception):
    """Base class for package errors."""


class DimensionError(MfsiError):
    """Operands live in different spatial dimensions."""


class ConvergenceError(MfsiError):
    """An iterative numerical routine failed to converge."""


class NoSupportError(MfsiError):
    """A profile contains no values above the detection threshold."""


class ConfigError(MfsiError):
    """A scenario file is malformed or inconsistent."""

"""Exception types shared across the package.

The CLI maps each family onto an exit code: input problems exit 2,
configuration problems exit 3, numeric failures exit 4.
"""


class GsmapError(Exception):
    """Base class for all errors raised by gsmap."""

    exit_code = 1


class InputError(GsmapError, ValueError):
    """Malformed, missing or inconsistent input data."""

    exit_code = 2


class ConfigError(GsmapError, ValueError):
    """A parameter violates a precondition."""

    exit_code = 3


class NumericError(GsmapError, ArithmeticError):
    """A computation produced a non-finite or otherwise unusable value."""

    exit_code = 4


class DegenerateSigmaError(NumericError):
    """Bandwidth calibration has no solution because every adjusted distance is zero."""

"""Exception types shared across the package.

The CLI maps these onto distinct exit codes: configuration and argument
problems exit 2, file format and I/O problems exit 3, numeric failures
exit 4.
"""


class ConfigError(ValueError):
    """Invalid configuration or hyper-parameter value."""


class FormatError(ValueError):
    """Malformed binary dataset file (bad magic, truncation, count mismatch)."""


class NumericError(ArithmeticError):
    """A NaN or Inf appeared where a finite value is required."""

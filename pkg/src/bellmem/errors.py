"""Exception types shared across the package.

The CLI maps these onto its exit codes (config -> 2, data -> 3,
fit -> 4), and the HTTP service maps them onto structured 4xx errors.
"""


class BellmemError(Exception):
    """Base class for all package errors."""


class ConfigError(BellmemError):
    """Invalid configuration input. Carries the offending field when known."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DataError(BellmemError):
    """Malformed or unusable event-log / results data."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class EstimateError(DataError):
    """An estimator is undefined on the given data (e.g. zero counts)."""


class FitError(BellmemError):
    """Nonlinear fit failed to converge. Carries the last iterate."""

    def __init__(self, message, last_params=None, residual_norm=None):
        super().__init__(message)
        self.last_params = last_params
        self.residual_norm = residual_norm

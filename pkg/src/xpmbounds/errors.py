"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration and parameter
errors exit 2, data-file validation errors exit 3, numerical-convergence
failures exit 4.
"""


class XpmBoundsError(Exception):
    """Base class for all package errors."""


class ConfigurationError(XpmBoundsError):
    """A parameter combination that cannot be computed (usage error)."""


class DataValidationError(XpmBoundsError):
    """An input data file failed parsing or physical validation."""


class ConvergenceError(XpmBoundsError):
    """A numerical routine did not reach its accuracy target.

    Carries the best available estimate and an error bound so callers can
    decide whether the partial result is still useful.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class PoleError(ConfigurationError):
    """Evaluation requested exactly on an undamped resonance pole."""


class DivergentMomentError(ConfigurationError):
    """A requested moment integral diverges (undamped response)."""

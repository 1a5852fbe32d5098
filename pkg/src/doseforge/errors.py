"""Exception types shared across the package."""


class DoseForgeError(Exception):
    """Base class for all package errors."""


class ConfigError(DoseForgeError, ValueError):
    """Invalid configuration or parameter value."""


class DataError(DoseForgeError, ValueError):
    """Malformed or insufficient input data."""


class IdentifiabilityError(DataError):
    """Too few distinct doses to fit the candidate dose-response family."""


class DegenerateRateError(DoseForgeError, ValueError):
    """A rate parameter hit exactly 0 or 1 where a proper distribution is needed."""


class InitializationError(DoseForgeError, RuntimeError):
    """The sampler could not find a finite starting log-posterior."""


class AdaptationError(DoseForgeError, RuntimeError):
    """A chain rejected every proposal during warmup."""


class DiagnosticsUnavailable(DoseForgeError, ValueError):
    """Convergence diagnostics need at least two chains."""


class ConvergenceError(DoseForgeError, RuntimeError):
    """One or more candidate fits exceeded the R-hat limit."""

    def __init__(self, message, offenders=()):
        super().__init__(message)
        self.offenders = list(offenders)

"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: configuration/usage problems -> 1,
data/format problems -> 2, numerical failures -> 3.
"""


class MotifcfError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MotifcfError):
    """Invalid configuration value, unknown key, or bad argument."""


class DatasetError(MotifcfError):
    """Missing or unreadable dataset file."""


class FormatError(MotifcfError):
    """Malformed dataset content; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class CapabilityError(MotifcfError):
    """Request exceeds a documented implementation bound."""


class ProducerError(MotifcfError):
    """Counterfactual production failed (empty motif/context, bad donors)."""


class NumericalError(MotifcfError):
    """NaN/Inf encountered or a gradient check failed."""


class MetricsError(MotifcfError):
    """Metric cannot be computed from the given inputs."""

"""Exception types shared across the package."""


class TriTraceError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(TriTraceError, ValueError):
    """An argument violates a documented precondition."""


class NumericOverflowError(TriTraceError, ArithmeticError):
    """A kernel produced a non-finite intermediate value."""


class DegenerateTargetError(TriTraceError):
    """A distributional check was asked to standardise by a vanishing variance."""


class DegenerateRateError(TriTraceError):
    """A deviation-rate prediction would divide by a vanishing variance."""


class ConfigError(TriTraceError):
    """A run configuration is malformed or incomplete."""

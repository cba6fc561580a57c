"""Exception types raised by the package."""


class NetrankError(Exception):
    """Base class for all errors raised here."""


class ParameterError(NetrankError, ValueError):
    """An argument is outside the domain an operation accepts."""


class ConfigurationError(ParameterError):
    """A combination of engine settings cannot be honoured."""


class UndefinedCorrelationError(NetrankError, ValueError):
    """Pearson correlation is undefined for every requested pair."""


class EvaluationError(NetrankError, ValueError):
    """Ground truth is too degenerate to score a reconstruction."""

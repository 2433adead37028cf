"""Exception hierarchy shared by all qdrbench modules."""


class QdrBenchError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(QdrBenchError):
    """Invalid configuration value (qubit count, perplexity, generator counts...)."""


class DimensionError(QdrBenchError):
    """Shape or size mismatch between operands."""


class GateError(QdrBenchError):
    """Gate construction problem: bad arity, duplicate wires, unknown kind."""


class NormalizationError(QdrBenchError):
    """Input cannot be normalized (e.g. all-zero amplitude vector)."""


class UsageError(QdrBenchError):
    """Operation called outside its contract (empty batch, bad labels...)."""


class ConvergenceError(QdrBenchError):
    """Iterative solver did not converge; may carry a partial model."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SuiteParseError(QdrBenchError):
    """Malformed suite or experiment config file."""

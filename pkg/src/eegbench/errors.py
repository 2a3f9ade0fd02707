"""Exception types shared across the benchmark stack."""


class EegBenchError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(EegBenchError):
    """Input file header does not match the expected column layout."""


class ParseError(EegBenchError):
    """A data row could not be parsed (non-numeric sample, bad label)."""


class EmptyInputError(EegBenchError):
    """An input that must be non-empty was empty."""


class InsufficientClassError(EegBenchError):
    """An operation needed at least one record of a class that is absent."""


class StratificationError(EegBenchError):
    """A stratified partition cannot be built with the given class counts."""


class TrainingDivergedError(EegBenchError):
    """An iterative fit produced non-finite losses or residuals."""


class UndefinedMetricError(EegBenchError):
    """A metric is undefined for the given inputs (e.g. single-class AUC)."""


class ConfigError(EegBenchError):
    """An experiment configuration is invalid."""

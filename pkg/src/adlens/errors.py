"""Exception taxonomy. The CLI maps these onto exit codes (data=3, numeric=4)."""


class AdlensError(Exception):
    """Base class for all package errors."""


class DataError(AdlensError):
    """Bad or inconsistent input data (files, records, references)."""


class NumericError(AdlensError):
    """A computation is undefined or numerically impossible on this input."""


class InvalidRangeError(DataError):
    """Closed integer range with lower > upper."""


class DanglingReferenceError(DataError):
    """Graph construction input refers to an unknown ad/entity/word."""


class SamplingError(DataError):
    """Negative-sampling pool is empty."""


class EmptySeriesError(DataError):
    """Time-series construction produced no usable days."""


class UndefinedPMIError(NumericError):
    """PMI requested for a word absent from the whole corpus."""


class UndefinedStatisticError(NumericError):
    """Statistic undefined on this input (constant sample, empty holdout...)."""


class SingularDesignError(NumericError):
    """Rank-deficient regression design matrix."""

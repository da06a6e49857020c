"""Exception types shared across the package."""


class GWBoostError(Exception):
    """Base class for all package errors."""


class DataError(GWBoostError):
    """Invalid or malformed input data (CSV parsing, validation, folds)."""


class ModelError(GWBoostError):
    """Invalid model file or model/data mismatch."""

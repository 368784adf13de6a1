"""Exception types shared across the package."""


class EkfPropError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(EkfPropError, ValueError):
    """Inconsistent dimensions between arrays, layers, or files."""


class FormatError(EkfPropError, ValueError):
    """Malformed or internally inconsistent model/noise/report/dataset file."""


class NumericError(EkfPropError, ValueError):
    """Non-finite values, asymmetry, or loss of positive semidefiniteness."""

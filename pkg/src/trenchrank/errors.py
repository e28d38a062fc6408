"""Exception types shared across the package.

The CLI maps these onto process exit codes: usage problems exit 1,
``DataError`` exits 2, ``FitError`` exits 3.
"""


class TrenchRankError(Exception):
    """Base class for all package-specific errors."""


class DataError(TrenchRankError):
    """Invalid, inconsistent, or missing input data."""


class FitError(TrenchRankError):
    """Numerical failure while fitting a model."""

"""Exception types raised by rvcontrib.

Everything derives from :class:`RVContribError`. Problems with the data
itself derive from :class:`DataError` (also a ``ValueError``) so callers that
only care about "bad input" can catch one type.
"""

from __future__ import annotations


class RVContribError(Exception):
    """Base class for all rvcontrib errors."""


class DataError(RVContribError, ValueError):
    """Input data violates a precondition of an operation."""


class InvalidMatrix(DataError):
    """Matrix shape, labels or values are not acceptable."""


class ConstantColumn(DataError):
    def __init__(self, name: str):
        super().__init__(f"column {name!r} has zero variance and cannot be standardized")
        self.name = name


class RowMismatch(DataError):
    """Two matrices do not share row identifiers in the same order."""


class RankDeficientConfounders(DataError):
    """Confounder design matrix (with intercept) is not of full column rank."""


class DegenerateDenominator(DataError):
    """A total squared covariance in an RV ratio is zero."""


class IndexOutOfRange(DataError, IndexError):
    pass


class EmptyGrid(DataError):
    pass


class NotPositiveDefinite(DataError):
    pass


class OverlappingBlocks(DataError):
    pass


class CsvError(DataError):
    """Base class for CSV ingestion failures; carries the 1-based location."""

    def __init__(self, message: str, path=None, row: int | None = None, col: int | None = None):
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"line {row}")
        if col is not None:
            where.append(f"column {col}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.row = row
        self.col = col


class ParseError(CsvError):
    pass


class RaggedRow(CsvError):
    pass


class MissingValue(CsvError):
    pass


class DuplicateName(CsvError):
    pass

"""Labelled dense matrices, standardization, confounder adjustment and
cross-correlation.

All covariances use the ``n - 1`` divisor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (
    ConstantColumn,
    DataError,
    InvalidMatrix,
    RankDeficientConfounders,
    RowMismatch,
)

# Residual columns this small relative to the centered input are exact fits.
_RESIDUAL_ZERO_RTOL = 1e-10
# Pivoted-QR diagonal ratio below which the confounder design is rank deficient.
_RANK_RTOL = 1e-10


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """An ``n x m`` real matrix with row identifiers and column names.

    ``values`` is stored as a read-only float64 copy, so instances can be
    shared freely between threads.
    """

    values: np.ndarray
    row_ids: tuple[str, ...]
    col_names: tuple[str, ...]

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 2:
            raise InvalidMatrix(f"expected a 2-D matrix, got {values.ndim} dimension(s)")
        n, m = values.shape
        if n < 2 or m < 1:
            raise InvalidMatrix(f"need at least 2 rows and 1 column, got {n}x{m}")
        if not np.all(np.isfinite(values)):
            r, c = np.argwhere(~np.isfinite(values))[0]
            raise InvalidMatrix(f"non-finite value at row {r}, column {c}")
        row_ids = tuple(str(r) for r in self.row_ids)
        col_names = tuple(str(c) for c in self.col_names)
        if len(row_ids) != n:
            raise InvalidMatrix(f"{len(row_ids)} row ids for {n} rows")
        if len(col_names) != m:
            raise InvalidMatrix(f"{len(col_names)} column names for {m} columns")
        _check_unique(row_ids, "row id")
        _check_unique(col_names, "column name")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "row_ids", row_ids)
        object.__setattr__(self, "col_names", col_names)

    @classmethod
    def from_array(
        cls,
        values,
        row_ids: Sequence[str] | None = None,
        col_names: Sequence[str] | None = None,
        prefix: str = "V",
    ):
        """Wrap a plain array, numbering rows from 1 and naming columns
        ``{prefix}1 .. {prefix}m`` when labels are not given."""
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if row_ids is None:
            row_ids = [str(i + 1) for i in range(arr.shape[0])]
        if col_names is None:
            col_names = [f"{prefix}{j + 1}" for j in range(arr.shape[1])]
        return cls(arr, tuple(row_ids), tuple(col_names))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column_index(self, name: str) -> int:
        try:
            return self.col_names.index(name)
        except ValueError:
            raise KeyError(f"no column named {name!r}") from None

    def __repr__(self):
        n, m = self.shape
        return f"{type(self).__name__}({n}x{m}, cols={list(self.col_names[:4])}{'...' if m > 4 else ''})"


class StandardizedMatrix(DataMatrix):
    """A :class:`DataMatrix` whose columns have mean 0 and sample SD 1."""

    def __post_init__(self):
        super().__post_init__()
        v = self.values
        means = v.mean(axis=0)
        sds = v.std(axis=0, ddof=1)
        if np.any(np.abs(means) >= 1e-10) or np.any(np.abs(sds - 1.0) > 1e-10):
            raise InvalidMatrix("columns are not standardized (mean 0, sample SD 1)")


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """``p x q`` matrix of Pearson correlations between two column sets."""

    values: np.ndarray
    x_names: tuple[str, ...]
    y_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "x_names", tuple(self.x_names))
        object.__setattr__(self, "y_names", tuple(self.y_names))


def _check_unique(labels, what):
    seen = set()
    for label in labels:
        if label in seen:
            raise InvalidMatrix(f"duplicate {what} {label!r}")
        seen.add(label)


def require_same_rows(a: DataMatrix, b: DataMatrix) -> None:
    if a.n != b.n:
        raise RowMismatch(f"row counts differ: {a.n} vs {b.n}")
    if a.row_ids != b.row_ids:
        i = next(i for i, (r, s) in enumerate(zip(a.row_ids, b.row_ids)) if r != s)
        raise RowMismatch(
            f"row ids differ at position {i}: {a.row_ids[i]!r} vs {b.row_ids[i]!r}"
        )


def standardize_array(values: np.ndarray, names: Sequence[str] | None = None) -> np.ndarray:
    """Center each column and divide by its sample SD (``ddof=1``)."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape[0] < 2:
        raise DataError("standardization needs at least 2 rows")
    centered = values - values.mean(axis=0)
    sds = np.sqrt((centered * centered).sum(axis=0) / (values.shape[0] - 1))
    scale = np.abs(values).max(axis=0)
    bad = (sds == 0) | (sds <= 1e-12 * scale)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise ConstantColumn(names[j] if names is not None else f"#{j}")
    out = centered / sds
    # A second centering pass removes the rounding residue of the first.
    return out - out.mean(axis=0)


def standardize_columns(m: DataMatrix) -> StandardizedMatrix:
    """Return ``m`` with every column scaled to mean 0 and sample SD 1.

    Raises
    ------
    ConstantColumn
        If any column has zero variance.
    """
    if isinstance(m, StandardizedMatrix):
        return m
    return StandardizedMatrix(standardize_array(m.values, m.col_names), m.row_ids, m.col_names)


def residualize(m: DataMatrix, z: DataMatrix | None = None) -> DataMatrix:
    """Least-squares residuals of every column of ``m`` on ``[1, z]``.

    An intercept is always included, so with ``z=None`` this is plain
    column centering. The fit uses a column-pivoted QR decomposition of the
    design rather than the normal equations.

    Residual columns whose norm is below ``1e-10`` times the norm of the
    centered input column are set exactly to zero; they are perfect fits.
    """
    n = m.n
    if z is None:
        design = np.ones((n, 1))
    else:
        require_same_rows(m, z)
        design = np.column_stack([np.ones(n), z.values])
    k = design.shape[1]
    if n <= k:
        raise RankDeficientConfounders(
            f"{n} rows cannot be adjusted for {k} design columns (intercept included)"
        )
    q, r, _ = scipy.linalg.qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[-1] <= _RANK_RTOL * diag[0]:
        raise RankDeficientConfounders(
            f"confounder design (intercept + {k - 1} columns) is not of full column rank"
        )
    values = m.values
    resid = values - q @ (q.T @ values)
    # One refinement pass keeps orthogonality tight for ill-conditioned designs.
    resid = resid - q @ (q.T @ resid)
    centered = values - values.mean(axis=0)
    ref = np.linalg.norm(centered, axis=0)
    small = np.linalg.norm(resid, axis=0) <= _RESIDUAL_ZERO_RTOL * ref
    resid[:, small] = 0.0
    return DataMatrix(resid, m.row_ids, m.col_names)


def correlation_array(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Cross-correlations of two standardized arrays: ``xs.T @ ys / (n - 1)``."""
    return (xs.T @ ys) / (xs.shape[0] - 1)


def pairwise_correlation(xs: StandardizedMatrix, ys: StandardizedMatrix) -> CorrelationMatrix:
    """Pearson correlation of every column of ``xs`` with every column of ``ys``."""
    _require_standardized(xs, ys)
    require_same_rows(xs, ys)
    return CorrelationMatrix(correlation_array(xs.values, ys.values), xs.col_names, ys.col_names)


def _require_standardized(*ms):
    for m in ms:
        if not isinstance(m, StandardizedMatrix):
            raise TypeError(
                f"expected a StandardizedMatrix, got {type(m).__name__}; "
                "call standardize_columns() first"
            )

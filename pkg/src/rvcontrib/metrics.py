"""RV coefficient, powered-correlation statistic and contribution profiles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DegenerateDenominator, IndexOutOfRange
from .matrix import (
    DataMatrix,
    StandardizedMatrix,
    _require_standardized,
    correlation_array,
    require_same_rows,
)


@dataclass(frozen=True, eq=False)
class ContributionProfile:
    """Per-variable contributions at one power, with an optional threshold.

    ``flagged`` holds the 0-based indices whose contribution strictly
    exceeds ``threshold``; it is empty when no threshold is set.
    """

    alpha: int
    contributions: np.ndarray
    variable_names: tuple[str, ...]
    threshold: float | None = None
    flagged: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        c = np.array(self.contributions, dtype=np.float64, copy=True)
        c.setflags(write=False)
        if c.ndim != 1 or c.size != len(self.variable_names):
            raise DataError("contributions and variable_names must have equal length")
        if np.any(c < 0):
            raise DataError("contributions must be nonnegative")
        object.__setattr__(self, "contributions", c)
        object.__setattr__(self, "variable_names", tuple(self.variable_names))
        if self.threshold is None:
            flagged = ()
        else:
            object.__setattr__(self, "threshold", float(self.threshold))
            flagged = tuple(int(k) for k in np.flatnonzero(c > self.threshold))
        object.__setattr__(self, "flagged", flagged)

    @property
    def flagged_names(self) -> list[str]:
        return [self.variable_names[k] for k in self.flagged]

    def with_threshold(self, threshold: float) -> "ContributionProfile":
        return ContributionProfile(self.alpha, self.contributions, self.variable_names, threshold)

    def __eq__(self, other):
        if not isinstance(other, ContributionProfile):
            return NotImplemented
        return (
            self.alpha == other.alpha
            and self.variable_names == other.variable_names
            and self.threshold == other.threshold
            and np.array_equal(self.contributions, other.contributions)
        )


def check_alpha(alpha) -> int:
    if isinstance(alpha, bool) or int(alpha) != alpha or alpha < 1:
        raise DataError(f"alpha must be a positive integer, got {alpha!r}")
    return int(alpha)


def powered_contributions(r: np.ndarray, alpha: int) -> np.ndarray:
    """Row sums of ``r ** (2 * alpha)`` over the last axis.

    Works on a single ``p x q`` correlation matrix or a stack of them.
    """
    return np.power(r * r, alpha).sum(axis=-1)


def rv_coefficient(x: DataMatrix, y: DataMatrix) -> float:
    """Sample RV coefficient between the column sets of ``x`` and ``y``.

    Computed as ``||S_xy||^2 / sqrt(||S_xx||^2 ||S_yy||^2)`` with sample
    covariance matrices and the Frobenius norm. For single columns this is
    the squared Pearson correlation.
    """
    require_same_rows(x, y)
    xc = x.values - x.values.mean(axis=0)
    yc = y.values - y.values.mean(axis=0)
    d = x.n - 1
    sxy = xc.T @ yc / d
    sxx = xc.T @ xc / d
    syy = yc.T @ yc / d
    den = np.sqrt(np.sum(sxx * sxx) * np.sum(syy * syy))
    if den == 0:
        raise DegenerateDenominator("one of the matrices has zero total squared covariance")
    return float(np.sum(sxy * sxy) / den)


def contributions(xs: StandardizedMatrix, ys: StandardizedMatrix, alpha: int = 1) -> ContributionProfile:
    """Contribution of each column of ``xs``: sum over ``ys`` columns of
    ``cor ** (2 * alpha)``. The returned profile has no threshold."""
    _require_standardized(xs, ys)
    require_same_rows(xs, ys)
    alpha = check_alpha(alpha)
    r = correlation_array(xs.values, ys.values)
    return ContributionProfile(alpha, powered_contributions(r, alpha), xs.col_names)


def modified_rv_statistic(xs: StandardizedMatrix, ys: StandardizedMatrix, alpha: int = 1) -> float:
    """Sum of ``cor ** (2 * alpha)`` over all column pairs (unnormalized)."""
    return float(contributions(xs, ys, alpha).contributions.sum())


def per_response_profile(
    xs: StandardizedMatrix, ys: StandardizedMatrix, k: int, alpha: int = 1
) -> np.ndarray:
    """``cor(xs[:, k], ys[:, l]) ** (2 * alpha)`` for every response ``l``."""
    _require_standardized(xs, ys)
    require_same_rows(xs, ys)
    alpha = check_alpha(alpha)
    p = xs.shape[1]
    if isinstance(k, bool) or not 0 <= k < p:
        raise IndexOutOfRange(f"variable index {k} outside [0, {p})")
    r = correlation_array(xs.values[:, [k]], ys.values)[0]
    return np.power(r * r, alpha)

"""End-to-end analysis: adjust, standardize, test, decompose, threshold."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .matrix import DataMatrix, StandardizedMatrix, residualize, standardize_columns
from .metrics import ContributionProfile, per_response_profile
from .permutation import (
    DEFAULT_GRID,
    PermutationPlan,
    TestResult,
    adaptive_result,
    null_distribution,
    threshold_from_maxima,
)


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    """Everything an analysis run produces.

    ``per_response`` maps each flagged variable name to its powered
    correlations with the responses, ordered as ``response_names``.
    """

    test: TestResult
    profile: ContributionProfile
    per_response: dict[str, np.ndarray]
    response_names: tuple[str, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.profile.alpha != self.test.alpha_m:
            raise ValueError("profile power differs from the selected power")
        extra = set(self.per_response) - set(self.profile.flagged_names)
        if extra:
            raise ValueError(f"per-response entries for unflagged variables: {sorted(extra)}")

    def __eq__(self, other):
        if not isinstance(other, AnalysisReport):
            return NotImplemented
        return (
            self.test == other.test
            and self.profile == other.profile
            and self.response_names == other.response_names
            and self.per_response.keys() == other.per_response.keys()
            and all(np.array_equal(v, other.per_response[k]) for k, v in self.per_response.items())
            and self.provenance == other.provenance
        )


def prepare(
    x: DataMatrix, y: DataMatrix, confounders: DataMatrix | None = None
) -> tuple[StandardizedMatrix, StandardizedMatrix]:
    """Residualize on ``confounders`` (when given) and standardize both sets."""
    if confounders is not None:
        x = residualize(x, confounders)
        y = residualize(y, confounders)
    return standardize_columns(x), standardize_columns(y)


def analyze(
    x: DataMatrix,
    y: DataMatrix,
    confounders: DataMatrix | None = None,
    grid: Sequence[int] = DEFAULT_GRID,
    plan: PermutationPlan = PermutationPlan(),
    threads: int = 1,
) -> AnalysisReport:
    """Run the adaptive test and build the thresholded contribution profile
    at the selected power.

    One set of ``plan.n_perms`` permutations serves both the test and the
    threshold.
    """
    xs, ys = prepare(x, y, confounders)
    null = null_distribution(xs, ys, grid, plan, threads)
    test = adaptive_result(null)
    g = null.grid.index(test.alpha_m)
    threshold = threshold_from_maxima(null.max_contrib[:, g], plan.level)
    profile = ContributionProfile(
        test.alpha_m, null.observed_contrib[g], xs.col_names, threshold
    )
    per_response = {
        xs.col_names[k]: per_response_profile(xs, ys, k, test.alpha_m) for k in profile.flagged
    }
    provenance = {
        "software": f"rvcontrib {__version__}",
        "grid": list(null.grid),
        "n_perms": plan.n_perms,
        "seed": plan.seed,
        "level": plan.level,
        "confounders": confounders is not None,
    }
    return AnalysisReport(test, profile, per_response, ys.col_names, provenance)

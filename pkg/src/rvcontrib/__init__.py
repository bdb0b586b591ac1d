"""Multivariate association via the RV coefficient and powered correlations.

The contribution of each explanatory variable is the sum, over responses,
of its squared correlations raised to a power; a permutation threshold on
the maximum contribution marks the noteworthy variables.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConstantColumn,
    DataError,
    DegenerateDenominator,
    EmptyGrid,
    IndexOutOfRange,
    NotPositiveDefinite,
    OverlappingBlocks,
    RankDeficientConfounders,
    RowMismatch,
    RVContribError,
)
from .matrix import (  # noqa: E402
    CorrelationMatrix,
    DataMatrix,
    StandardizedMatrix,
    pairwise_correlation,
    residualize,
    standardize_columns,
)
from .metrics import (  # noqa: E402
    ContributionProfile,
    contributions,
    modified_rv_statistic,
    per_response_profile,
    rv_coefficient,
)
from .permutation import (  # noqa: E402
    PermutationPlan,
    TestResult,
    aspc,
    contribution_threshold,
    spc_pvalue,
)
from .analysis import AnalysisReport, analyze  # noqa: E402

__all__ = [
    "AnalysisReport",
    "ConstantColumn",
    "ContributionProfile",
    "CorrelationMatrix",
    "DataError",
    "DataMatrix",
    "DegenerateDenominator",
    "EmptyGrid",
    "IndexOutOfRange",
    "NotPositiveDefinite",
    "OverlappingBlocks",
    "PermutationPlan",
    "RVContribError",
    "RankDeficientConfounders",
    "RowMismatch",
    "StandardizedMatrix",
    "TestResult",
    "analyze",
    "aspc",
    "contribution_threshold",
    "contributions",
    "modified_rv_statistic",
    "pairwise_correlation",
    "per_response_profile",
    "residualize",
    "rv_coefficient",
    "spc_pvalue",
    "standardize_columns",
]

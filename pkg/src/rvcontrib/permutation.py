"""Monte Carlo permutation inference for the powered-correlation statistic.

Every permutation ``b`` shuffles the rows of the standardized ``X`` using
its own random stream, derived from ``(plan.seed, b)`` through
:class:`numpy.random.SeedSequence`. Permutations are evaluated in
fixed-size chunks, optionally on a thread pool; since neither the streams
nor the chunk boundaries depend on the worker count, results are
bit-identical for any ``threads`` value.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, EmptyGrid
from .matrix import StandardizedMatrix, _require_standardized, require_same_rows
from .metrics import check_alpha

DEFAULT_GRID = (1, 2, 3, 4)
DEFAULT_N_PERMS = 5000
DEFAULT_LEVEL = 0.95
DEFAULT_SEED = 20190130

CHUNK_SIZE = 64
# Statistics within this relative distance count as ties; equal values
# reached through different summation orders differ by a few ulps.
TIE_RTOL = 1e-10


@dataclass(frozen=True)
class PermutationPlan:
    """Number of permutations, RNG seed and threshold quantile level."""

    n_perms: int = DEFAULT_N_PERMS
    seed: int = DEFAULT_SEED
    level: float = DEFAULT_LEVEL

    def __post_init__(self):
        if isinstance(self.n_perms, bool) or int(self.n_perms) != self.n_perms or self.n_perms < 1:
            raise DataError(f"n_perms must be a positive integer, got {self.n_perms!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DataError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not 0.0 < self.level < 1.0:
            raise DataError(f"level must lie strictly between 0 and 1, got {self.level!r}")
        object.__setattr__(self, "n_perms", int(self.n_perms))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "level", float(self.level))


@dataclass(frozen=True)
class TestResult:
    """Outcome of the adaptive test over a grid of powers."""

    __test__ = False  # not a pytest class

    grid: tuple[int, ...]
    observed: tuple[float, ...]
    p_values: tuple[float, ...]
    alpha_m: int
    aspc_p: float
    n_perms: int

    def p_value(self, alpha: int) -> float:
        return self.p_values[self.grid.index(alpha)]


@dataclass(frozen=True, eq=False)
class NullDistribution:
    """Observed and permuted statistics for every power in ``grid``.

    ``stats[b, g]`` is the powered-correlation statistic of permutation ``b``
    at ``grid[g]``; ``max_contrib[b, g]`` its largest per-variable
    contribution. ``observed_contrib[g]`` holds the unpermuted contributions.
    """

    grid: tuple[int, ...]
    observed: np.ndarray
    observed_contrib: np.ndarray
    stats: np.ndarray
    max_contrib: np.ndarray

    @property
    def n_perms(self) -> int:
        return self.stats.shape[0]


def check_grid(grid: Sequence[int]) -> tuple[int, ...]:
    grid = tuple(check_alpha(a) for a in grid)
    if not grid:
        raise EmptyGrid("the grid of powers is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DataError(f"grid must be strictly ascending, got {list(grid)}")
    return grid


def permutation_indices(n: int, seed: int, b: int) -> np.ndarray:
    """Row order used by permutation ``b`` (0-based) under ``seed``."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(b,))))
    return rng.permutation(n)


def _evaluate(xs_t, ys, orders, grid):
    """Statistics and contributions for a batch of row orders of X.

    ``xs_t`` is the transposed standardized X (p x n); ``orders`` is
    (batch, n). Returns arrays shaped (batch, G) and (batch, G, p).
    """
    n = ys.shape[0]
    xp = np.ascontiguousarray(np.moveaxis(xs_t[:, orders], 1, 0))  # (batch, p, n)
    r = np.matmul(xp, ys) / (n - 1)
    r2 = r * r
    contrib = np.stack([np.power(r2, a).sum(axis=-1) for a in grid], axis=1)
    return contrib.sum(axis=-1), contrib


def null_distribution(
    xs: StandardizedMatrix,
    ys: StandardizedMatrix,
    grid: Sequence[int],
    plan: PermutationPlan,
    threads: int = 1,
) -> NullDistribution:
    """Evaluate the observed data and ``plan.n_perms`` row permutations of X."""
    _require_standardized(xs, ys)
    require_same_rows(xs, ys)
    grid = check_grid(grid)
    n = xs.n
    if n < 3:
        raise DataError(f"permutation inference needs at least 3 rows, got {n}")
    xs_t = np.ascontiguousarray(xs.values.T)
    ys_v = np.ascontiguousarray(ys.values)

    def run(start):
        stop = min(start + CHUNK_SIZE, plan.n_perms)
        orders = np.stack([permutation_indices(n, plan.seed, b) for b in range(start, stop)])
        stats, contrib = _evaluate(xs_t, ys_v, orders, grid)
        return stats, contrib.max(axis=-1)

    return _assemble(xs_t, ys_v, grid, run, range(0, plan.n_perms, CHUNK_SIZE), threads)


def null_distribution_for_orders(
    xs: StandardizedMatrix,
    ys: StandardizedMatrix,
    grid: Sequence[int],
    orders,
) -> NullDistribution:
    """Like :func:`null_distribution` but with explicit row orders of X,
    one per row of ``orders`` (e.g. a full enumeration for small ``n``)."""
    _require_standardized(xs, ys)
    require_same_rows(xs, ys)
    grid = check_grid(grid)
    orders = np.asarray(orders, dtype=np.intp)
    if orders.ndim != 2 or orders.shape[1] != xs.n or orders.shape[0] < 1:
        raise DataError(f"orders must have shape (B, {xs.n})")
    xs_t = np.ascontiguousarray(xs.values.T)
    ys_v = np.ascontiguousarray(ys.values)

    def run(start):
        stats, contrib = _evaluate(xs_t, ys_v, orders[start : start + CHUNK_SIZE], grid)
        return stats, contrib.max(axis=-1)

    return _assemble(xs_t, ys_v, grid, run, range(0, len(orders), CHUNK_SIZE), 1)


def _assemble(xs_t, ys_v, grid, run, starts, threads):
    obs_stats, obs_contrib = _evaluate(xs_t, ys_v, np.arange(ys_v.shape[0])[None, :], grid)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return NullDistribution(
        grid=grid,
        observed=obs_stats[0],
        observed_contrib=obs_contrib[0],
        stats=np.concatenate([s for s, _ in parts]),
        max_contrib=np.concatenate([m for _, m in parts]),
    )


def _count_at_least(sorted_null: np.ndarray, values: np.ndarray) -> np.ndarray:
    """For each value ``v``, the number of null statistics ``>= v`` (ties
    within ``TIE_RTOL``)."""
    cut = values - TIE_RTOL * np.abs(values)
    return sorted_null.size - np.searchsorted(sorted_null, cut, side="left")


def permutation_p_values(null: NullDistribution) -> np.ndarray:
    """``(1 + #{b : T_b >= T_obs}) / (1 + B)`` for every power in the grid."""
    B = null.n_perms
    out = np.empty(len(null.grid))
    for g in range(len(null.grid)):
        s = np.sort(null.stats[:, g])
        out[g] = (1 + _count_at_least(s, null.observed[g : g + 1])[0]) / (B + 1)
    return out


def leave_one_out_p_values(null: NullDistribution) -> np.ndarray:
    """p-value of each permutation ranked against the other ``B - 1``.

    Entry ``[b, g]`` is ``(1 + #{b' != b : T_b' >= T_b}) / B``.
    """
    B = null.n_perms
    out = np.empty_like(null.stats)
    for g in range(len(null.grid)):
        col = null.stats[:, g]
        # the count includes b itself, which supplies the "+1"
        out[:, g] = _count_at_least(np.sort(col), col) / B
    return out


def select_power(grid: Sequence[int], p_values: Sequence[float]) -> int:
    """Power with the smallest p-value; ties go to the smallest power."""
    return grid[int(np.argmin(p_values))]


def adaptive_result(null: NullDistribution) -> TestResult:
    """Assemble the adaptive min-p test from a computed null distribution."""
    p = permutation_p_values(null)
    min_obs = p.min()
    min_perm = leave_one_out_p_values(null).min(axis=1)
    hits = np.count_nonzero(min_perm <= min_obs * (1 + 1e-12))
    return TestResult(
        grid=null.grid,
        observed=tuple(float(v) for v in null.observed),
        p_values=tuple(float(v) for v in p),
        alpha_m=select_power(null.grid, p),
        aspc_p=(1 + hits) / (null.n_perms + 1),
        n_perms=null.n_perms,
    )



def threshold_from_maxima(maxima: np.ndarray, level: float) -> float:
    """Empirical ``level`` quantile of per-permutation maximum contributions,
    interpolating linearly between order statistics."""
    return float(np.quantile(maxima, level, method="linear"))


def spc_pvalue(
    xs: StandardizedMatrix,
    ys: StandardizedMatrix,
    alpha: int,
    plan: PermutationPlan,
    threads: int = 1,
) -> tuple[float, float]:
    """Observed statistic and permutation p-value of SPC(``alpha``)."""
    null = null_distribution(xs, ys, (alpha,), plan, threads)
    return float(null.observed[0]), float(permutation_p_values(null)[0])


def aspc(
    xs: StandardizedMatrix,
    ys: StandardizedMatrix,
    grid: Sequence[int] = DEFAULT_GRID,
    plan: PermutationPlan = PermutationPlan(),
    threads: int = 1,
) -> TestResult:
    """Adaptive test: minimum SPC p-value over ``grid``, calibrated on the
    same set of permutations."""
    return adaptive_result(null_distribution(xs, ys, grid, plan, threads))


def contribution_threshold(
    xs: StandardizedMatrix,
    ys: StandardizedMatrix,
    alpha: int,
    plan: PermutationPlan,
    threads: int = 1,
) -> float:
    """Permutation quantile of the maximum contribution at ``alpha``."""
    null = null_distribution(xs, ys, (alpha,), plan, threads)
    return threshold_from_maxima(null.max_contrib[:, 0], plan.level)

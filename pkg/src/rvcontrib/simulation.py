"""Simulated multivariate regression data ``Y = X B + E``.

Indices in :class:`BlockSpec` and in ``SimulationSpec.coefficients`` are
1-based, so preset definitions read like the usual ``B[30, 1] = 1``
notation.

Random draws: ``X`` uses the stream ``SeedSequence(seed, spawn_key=(0,))``
and ``E`` uses ``spawn_key=(1,)``, both through PCG64. Each stream fills an
``n x dim`` standard-normal matrix column by column, which is then
right-multiplied by the transpose of the lower Cholesky factor.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DataError, NotPositiveDefinite, OverlappingBlocks
from .matrix import DataMatrix
from .population import LinearModelSpec


@dataclass(frozen=True)
class BlockSpec:
    """Equicorrelated block on indices ``lo..hi`` (1-based, inclusive)."""

    lo: int
    hi: int
    off_diagonal: float

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise DataError(f"invalid block bounds {self.lo}..{self.hi}")
        if not -1.0 < self.off_diagonal < 1.0:
            raise DataError(f"off-diagonal value {self.off_diagonal} outside (-1, 1)")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1


def build_block_covariance(dim: int, blocks: Sequence[BlockSpec] = ()) -> np.ndarray:
    """Identity matrix with equicorrelated blocks.

    Raises
    ------
    OverlappingBlocks
        If two blocks share an index.
    NotPositiveDefinite
        If a block's off-diagonal value is at or below ``-1 / (size - 1)``.
    """
    if dim < 1:
        raise DataError(f"dimension must be positive, got {dim}")
    sigma = np.eye(dim)
    used = np.zeros(dim, dtype=bool)
    for blk in blocks:
        if not isinstance(blk, BlockSpec):
            blk = BlockSpec(*blk)
        if blk.hi > dim:
            raise DataError(f"block {blk.lo}..{blk.hi} exceeds dimension {dim}")
        idx = slice(blk.lo - 1, blk.hi)
        if used[idx].any():
            raise OverlappingBlocks(f"block {blk.lo}..{blk.hi} overlaps an earlier block")
        used[idx] = True
        if blk.size > 1 and blk.off_diagonal <= -1.0 / (blk.size - 1):
            raise NotPositiveDefinite(
                f"block {blk.lo}..{blk.hi}: off-diagonal {blk.off_diagonal} "
                f"<= -1/{blk.size - 1}"
            )
        sigma[idx, idx] = blk.off_diagonal
        np.fill_diagonal(sigma, 1.0)
    return sigma


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 generator for ``(seed, *key)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def replicate_seed(seed: int, index: int) -> int:
    """64-bit seed for replicate ``index``, disjoint from other replicates."""
    state = np.random.SeedSequence(seed, spawn_key=(2, index)).generate_state(1, np.uint64)
    return int(state[0])


def _cholesky(sigma):
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("covariance matrix is not positive definite") from None


def sample_mvn(n: int, sigma, seed=None, *, rng: np.random.Generator | None = None) -> np.ndarray:
    """``n`` i.i.d. draws from ``N(0, sigma)`` as an ``n x dim`` array."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=np.float64))
    if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12):
        raise NotPositiveDefinite("covariance matrix is not symmetric")
    chol = _cholesky(sigma)
    if rng is None:
        rng = stream(0 if seed is None else seed)
    dim = sigma.shape[0]
    z = rng.standard_normal(n * dim).reshape((n, dim), order="F")
    return z @ chol.T


@dataclass(frozen=True)
class SimulationSpec:
    n: int
    p: int
    q: int
    x_blocks: tuple[BlockSpec, ...] = ()
    e_blocks: tuple[BlockSpec, ...] = ()
    coefficients: tuple[tuple[int, int, float], ...] = ()
    seed: int = 0

    def __post_init__(self):
        for name in ("n", "p", "q"):
            if getattr(self, name) < 1:
                raise DataError(f"{name} must be positive")
        object.__setattr__(self, "x_blocks", tuple(
            b if isinstance(b, BlockSpec) else BlockSpec(*b) for b in self.x_blocks))
        object.__setattr__(self, "e_blocks", tuple(
            b if isinstance(b, BlockSpec) else BlockSpec(*b) for b in self.e_blocks))
        coefs = []
        for k, l, v in self.coefficients:
            if not (1 <= k <= self.p and 1 <= l <= self.q):
                raise DataError(f"coefficient ({k}, {l}) outside {self.p}x{self.q}")
            coefs.append((int(k), int(l), float(v)))
        object.__setattr__(self, "coefficients", tuple(coefs))

    def with_(self, **changes) -> "SimulationSpec":
        return replace(self, **changes)

    def linear_model(self) -> LinearModelSpec:
        return LinearModelSpec(
            build_block_covariance(self.p, self.x_blocks),
            build_block_covariance(self.q, self.e_blocks),
            tuple((k - 1, l - 1, v) for k, l, v in self.coefficients),
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "q": self.q,
            "x_blocks": [[b.lo, b.hi, b.off_diagonal] for b in self.x_blocks],
            "e_blocks": [[b.lo, b.hi, b.off_diagonal] for b in self.e_blocks],
            "coefficients": [list(c) for c in self.coefficients],
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationSpec":
        return cls(
            n=int(d["n"]),
            p=int(d["p"]),
            q=int(d["q"]),
            x_blocks=tuple(BlockSpec(*b) for b in d.get("x_blocks", ())),
            e_blocks=tuple(BlockSpec(*b) for b in d.get("e_blocks", ())),
            coefficients=tuple(tuple(c) for c in d.get("coefficients", ())),
            seed=int(d.get("seed", 0)),
        )


def generate_dataset(spec: SimulationSpec) -> tuple[DataMatrix, DataMatrix]:
    """Draw ``X ~ N(0, sigma_x)``, ``E ~ N(0, sigma_e)`` and return ``(X, X B + E)``."""
    model = spec.linear_model()
    x = sample_mvn(spec.n, model.sigma_x, rng=stream(spec.seed, 0))
    e = sample_mvn(spec.n, model.sigma_e, rng=stream(spec.seed, 1))
    y = e.copy()
    for k, l, v in model.coefficients:
        y[:, l] += v * x[:, k]
    rows = tuple(str(i + 1) for i in range(spec.n))
    return (
        DataMatrix(x, rows, tuple(f"X{k + 1}" for k in range(spec.p))),
        DataMatrix(y, rows, tuple(f"Y{l + 1}" for l in range(spec.q))),
    )


_SIGNALS = ((30, 1, 1.0), (70, 10, 1.0))


def dataset1(n: int = 100, p: int = 130, q: int = 25, seed: int = 0) -> SimulationSpec:
    """No association: identity covariances, ``B = 0``."""
    return SimulationSpec(n, p, q, seed=seed)


def dataset2(n: int = 100, seed: int = 0) -> SimulationSpec:
    """X25..X35 equicorrelated at 0.9; X30 -> Y1 and X70 -> Y10."""
    return SimulationSpec(
        n, 130, 25, x_blocks=(BlockSpec(25, 35, 0.9),), coefficients=_SIGNALS, seed=seed
    )


def dataset3(n: int = 100, seed: int = 0) -> SimulationSpec:
    """E1..E15 equicorrelated at 0.9; X30 -> Y1 and X70 -> Y10."""
    return SimulationSpec(
        n, 130, 25, e_blocks=(BlockSpec(1, 15, 0.9),), coefficients=_SIGNALS, seed=seed
    )


PRESETS = {"dataset1": dataset1, "dataset2": dataset2, "dataset3": dataset3}


def preset(name: str, seed: int = 0, n: int | None = None) -> SimulationSpec:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise DataError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return factory(seed=seed) if n is None else factory(n=n, seed=seed)

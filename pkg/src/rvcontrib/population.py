"""Closed-form population quantities of the linear model ``Y = X B + E``.

With ``X ~ N(0, sigma_x)`` and independent ``E ~ N(0, sigma_e)``::

    Cov(X, Y) = sigma_x B
    Cov(Y, Y) = B' sigma_x B + sigma_e
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateDenominator, NotPositiveDefinite


def require_positive_definite(sigma: np.ndarray, what: str = "covariance") -> None:
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DataError(f"{what} must be square, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12):
        raise NotPositiveDefinite(f"{what} is not symmetric")
    try:
        np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"{what} is not positive definite") from None


@dataclass(frozen=True, eq=False)
class LinearModelSpec:
    """Parameters of the regression model; ``coefficients`` lists nonzero
    ``(k, l, beta_kl)`` entries of ``B`` with 0-based indices."""

    sigma_x: np.ndarray
    sigma_e: np.ndarray
    coefficients: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        sx = np.array(self.sigma_x, dtype=np.float64)
        se = np.array(self.sigma_e, dtype=np.float64)
        require_positive_definite(sx, "sigma_x")
        require_positive_definite(se, "sigma_e")
        p, q = sx.shape[0], se.shape[0]
        coefs = []
        for k, l, v in self.coefficients:
            if not (0 <= k < p and 0 <= l < q):
                raise DataError(f"coefficient index ({k}, {l}) outside {p}x{q}")
            coefs.append((int(k), int(l), float(v)))
        for a in (sx, se):
            a.setflags(write=False)
        object.__setattr__(self, "sigma_x", sx)
        object.__setattr__(self, "sigma_e", se)
        object.__setattr__(self, "coefficients", tuple(coefs))

    @property
    def p(self) -> int:
        return self.sigma_x.shape[0]

    @property
    def q(self) -> int:
        return self.sigma_e.shape[0]

    @property
    def b(self) -> np.ndarray:
        out = np.zeros((self.p, self.q))
        for k, l, v in self.coefficients:
            out[k, l] += v
        return out


def population_cross_covariance(spec: LinearModelSpec) -> np.ndarray:
    """``Cov(X, Y) = sigma_x B`` as a ``p x q`` matrix."""
    return spec.sigma_x @ spec.b


def population_response_covariance(spec: LinearModelSpec) -> np.ndarray:
    """``Cov(Y, Y) = B' sigma_x B + sigma_e``."""
    b = spec.b
    return b.T @ spec.sigma_x @ b + spec.sigma_e


def _cov_to_cor(cov, sd_rows, sd_cols):
    return cov / np.outer(sd_rows, sd_cols)


def population_rv(spec: LinearModelSpec, standardized: bool = False) -> float:
    """Population vector correlation between X and Y.

    With ``standardized=True`` the covariances are replaced by correlations,
    i.e. the coefficient is that of the unit-variance variables.
    """
    sxx = spec.sigma_x
    sxy = population_cross_covariance(spec)
    syy = population_response_covariance(spec)
    if standardized:
        sd_x = np.sqrt(np.diag(sxx))
        sd_y = np.sqrt(np.diag(syy))
        sxy = _cov_to_cor(sxy, sd_x, sd_y)
        sxx = _cov_to_cor(sxx, sd_x, sd_x)
        syy = _cov_to_cor(syy, sd_y, sd_y)
    den = np.sqrt(np.sum(sxx**2) * np.sum(syy**2))
    if den == 0:
        raise DegenerateDenominator("population covariance has zero total square")
    return float(np.sum(sxy**2) / den)


def population_contributions(spec: LinearModelSpec, standardized: bool = False) -> np.ndarray:
    """Population contribution of each explanatory variable.

    Raw scale::

        C_k = sum_l ( beta_kl Var(X_k) + sum_{k' != k} beta_k'l Cov(X_k, X_k') )^2

    Standardized scale uses ``beta*_kl = beta_kl SD(X_k) / SD(Y_l)`` and
    ``Cor(X_k, X_k')`` in place of the variance and covariance terms.
    """
    b = spec.b
    sxx = spec.sigma_x
    if standardized:
        sd_x = np.sqrt(np.diag(sxx))
        sd_y = np.sqrt(np.diag(population_response_covariance(spec)))
        b = b * sd_x[:, None] / sd_y[None, :]
        sxx = _cov_to_cor(sxx, sd_x, sd_x)
    diag = np.diag(sxx)
    off = sxx - np.diag(diag)
    terms = b * diag[:, None] + off @ b
    return np.sum(terms**2, axis=1)


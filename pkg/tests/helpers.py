"""Shared test utilities and independent oracles."""

from functools import lru_cache
from fractions import Fraction
import itertools
import math

import numpy as np

from rvcontrib import DataMatrix, contributions, standardize_columns
from rvcontrib.simulation import dataset2, dataset3, generate_dataset


def random_data(rng, n, m, prefix="V"):
    return DataMatrix.from_array(rng.standard_normal((n, m)), prefix=prefix)


def naive_pearson(a, b):
    """Pearson correlation from first principles with plain Python floats."""
    n = len(a)
    ma = math.fsum(a) / n
    mb = math.fsum(b) / n
    sab = math.fsum((u - ma) * (v - mb) for u, v in zip(a, b))
    saa = math.fsum((u - ma) ** 2 for u in a)
    sbb = math.fsum((v - mb) ** 2 for v in b)
    return sab / math.sqrt(saa * sbb)


def naive_contributions(x, y, alpha):
    """Double loop over column pairs of two raw arrays."""
    p, q = x.shape[1], y.shape[1]
    out = []
    for k in range(p):
        total = 0.0
        for l in range(q):
            r = naive_pearson(list(x[:, k]), list(y[:, l]))
            total += r ** (2 * alpha)
        out.append(total)
    return np.array(out)


def exact_r2(a, b):
    """Squared Pearson correlation as an exact Fraction (integer data)."""
    n = len(a)
    a = [Fraction(v) for v in a]
    b = [Fraction(v) for v in b]
    ma, mb = sum(a) / n, sum(b) / n
    sab = sum((u - ma) * (v - mb) for u, v in zip(a, b))
    saa = sum((u - ma) ** 2 for u in a)
    sbb = sum((v - mb) ** 2 for v in b)
    return sab * sab / (saa * sbb)


def all_permutation_r2(x, y):
    """``r^2`` of ``x[perm]`` against ``y`` for every row permutation."""
    return [exact_r2([x[i] for i in perm], y) for perm in itertools.permutations(range(len(x)))]


def type7_quantile(values, level):
    """Linear-interpolation sample quantile, written out by hand."""
    s = sorted(values)
    h = (len(s) - 1) * level
    lo = math.floor(h)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


@lru_cache(maxsize=None)
def large_sample_contributions(name, n=500_000, seed=11):
    """alpha = 1 sample contributions of a preset at large n (cached)."""
    factory = {"dataset2": dataset2, "dataset3": dataset3}[name]
    x, y = generate_dataset(factory(n=n, seed=seed))
    c = contributions(standardize_columns(x), standardize_columns(y), 1).contributions
    return np.array(c)

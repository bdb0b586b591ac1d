"""Acceptance criteria, one test per criterion.

Each test attaches a one-line summary of what it measured; the summary is
printed as a PASS/FAIL table at the end of the session (see conftest.py).
"""

import json
import math

import numpy as np
import pytest
from scipy import stats

from rvcontrib import (
    DataMatrix,
    PermutationPlan,
    analyze,
    contributions,
    modified_rv_statistic,
    rv_coefficient,
    spc_pvalue,
    standardize_columns,
)
from rvcontrib.cli import main
from rvcontrib.errors import DuplicateName, MissingValue, ParseError, RaggedRow
from rvcontrib.io import dumps_report, load_matrix_csv, read_report, write_report
from rvcontrib.permutation import adaptive_result, null_distribution, threshold_from_maxima
from rvcontrib.plot import contribution_plot_svg
from rvcontrib.population import population_contributions
from rvcontrib.simulation import dataset1, dataset2, dataset3, generate_dataset, replicate_seed

from helpers import all_permutation_r2, exact_r2, large_sample_contributions, naive_contributions, naive_pearson

GRID = (1, 2, 3, 4)
BLOCK = [24, 25, 26, 27, 28, 30, 31, 32, 33, 34]  # X25..X35 without X30, 0-based


def standardized(spec):
    x, y = generate_dataset(spec)
    return standardize_columns(x), standardize_columns(y)


def replicate(spec, n_perms, rep):
    """Observed contributions, test result and per-power thresholds from one shared null."""
    xs, ys = standardized(spec)
    null = null_distribution(xs, ys, GRID, PermutationPlan(n_perms, seed=rep))
    result = adaptive_result(null)
    thresholds = [threshold_from_maxima(null.max_contrib[:, i], 0.95) for i in range(len(GRID))]
    return null.observed_contrib, result, thresholds


@pytest.fixture(scope="module")
def null_replicates():
    spec = dataset1(n=50, p=20, q=10)
    return [replicate(spec.with_(seed=replicate_seed(6, rep)), 200, rep) for rep in range(200)]


def test_01_identity_and_bounds(record_property):
    rng = np.random.default_rng(1)
    worst_self, lo, hi = 0.0, 1.0, 0.0
    for _ in range(50):
        x = DataMatrix.from_array(rng.standard_normal((50, int(rng.integers(1, 9)))))
        y = DataMatrix.from_array(rng.standard_normal((50, int(rng.integers(1, 9)))), prefix="Y")
        worst_self = max(worst_self, abs(rv_coefficient(x, x) - 1))
        v = rv_coefficient(x, y)
        lo, hi = min(lo, v), max(hi, v)
    record_property("detail", f"max |RV(X,X)-1| = {worst_self:.1e}; RV(X,Y) in [{lo:.3g}, {hi:.3g}]")
    assert worst_self <= 1e-10
    assert 0 <= lo and hi <= 1


def test_02_univariate_reduction(record_property):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        a = rng.standard_normal(30)
        b = 0.4 * a + rng.standard_normal(30)
        x = DataMatrix.from_array(a[:, None])
        y = DataMatrix.from_array(b[:, None], prefix="Y")
        worst = max(worst, abs(rv_coefficient(x, y) - naive_pearson(list(a), list(b)) ** 2))
    record_property("detail", f"max |RV - r^2| = {worst:.1e} over 50 pairs")
    assert worst <= 1e-12


def test_03_brute_force_equivalence(record_property):
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(100):
        n, p, q = int(rng.integers(5, 20)), int(rng.integers(1, 7)), int(rng.integers(1, 7))
        x, y = rng.standard_normal((n, p)), rng.standard_normal((n, q))
        xs = standardize_columns(DataMatrix.from_array(x))
        ys = standardize_columns(DataMatrix.from_array(y, prefix="Y"))
        alpha = 1 + i % 4
        want = naive_contributions(x, y, alpha)
        worst = max(worst, np.max(np.abs(contributions(xs, ys, alpha).contributions - want)))
        worst = max(worst, abs(modified_rv_statistic(xs, ys, alpha) - math.fsum(want)))
    record_property("detail", f"max abs deviation from double loop = {worst:.1e} over 100 instances")
    assert worst <= 1e-12


def test_04_population_oracle(record_property):
    pop = population_contributions(dataset2().linear_model(), standardized=True)
    ratio_err = np.max(np.abs(pop[BLOCK] / pop[29] - 0.81))
    sample = large_sample_contributions("dataset2")
    nz = pop > 0
    rel = np.max(np.abs(sample[nz] / pop[nz] - 1))
    record_property("detail", f"max |ratio-0.81| = {ratio_err:.1e}; max MC rel err at n=500000 = {rel:.2%}")
    assert ratio_err <= 1e-12
    assert rel <= 0.02


def test_05_exact_permutation_oracle(record_property):
    x4, y4 = [1, 2, 3, 5], [2, 1, 4, 3]
    xs = standardize_columns(DataMatrix.from_array(np.array(x4, float)[:, None]))
    ys = standardize_columns(DataMatrix.from_array(np.array(y4, float)[:, None], prefix="Y"))
    observed = exact_r2(x4, y4)
    exact = sum(v >= observed for v in all_permutation_r2(x4, y4)) / math.factorial(4)
    plan = PermutationPlan(20_000, seed=5)
    _, p = spc_pvalue(xs, ys, 1, plan)
    se = math.sqrt(float(exact) * (1 - float(exact)) / plan.n_perms)
    record_property("detail", f"MC p = {p:.5f}, exact p = {float(exact):.5f}, |diff|/se = {abs(p - exact) / se:.2f}")
    assert abs(p - float(exact)) <= 3 * se


def test_06_null_calibration(record_property, null_replicates):
    spc2 = np.mean([r.p_values[GRID.index(2)] <= 0.05 for _, r, _ in null_replicates])
    adaptive = np.mean([r.aspc_p <= 0.05 for _, r, _ in null_replicates])
    record_property("detail", f"rejection at 0.05 over 200 nulls: SPC(2) {spc2:.3f}, aSPC {adaptive:.3f}")
    assert 0.02 <= spc2 <= 0.09
    assert 0.02 <= adaptive <= 0.09


def test_07_familywise_threshold(record_property, null_replicates):
    exceed = []
    for contrib, result, thresholds in null_replicates:
        i = GRID.index(result.alpha_m)
        exceed.append(contrib[i].max() > thresholds[i])
    rate = float(np.mean(exceed))
    record_property("detail", f"any contribution above threshold at alpha_m in {rate:.3f} of 200 nulls")
    assert 0.02 <= rate <= 0.10


def test_08_power_and_localization(record_property):
    power = both = neighbour = 0
    for rep in range(50):
        contrib, result, thresholds = replicate(dataset2(seed=replicate_seed(8, rep)), 1000, rep)
        i = GRID.index(result.alpha_m)
        c = contrib[i]
        power += result.aspc_p < 0.01
        both += c[29] > thresholds[i] and c[69] > thresholds[i]
        neighbour += np.any(c[BLOCK] >= 0.5 * c[29])
    record_property("detail", f"of 50: aSPC p<0.01 {power}, X30 and X70 flagged {both}, sub-peak >= half {neighbour}")
    assert power >= 45
    assert both >= 35
    assert neighbour >= 40


def test_09_shrinkage_benefit(record_property):
    better = worse = at_m = at_1 = 0
    for rep in range(50):
        contrib, result, thresholds = replicate(dataset3(seed=replicate_seed(9, rep)), 1000, rep)

        def both_flagged(alpha):
            i = GRID.index(alpha)
            return bool(contrib[i][29] > thresholds[i] and contrib[i][69] > thresholds[i])

        m, one = both_flagged(result.alpha_m), both_flagged(1)
        at_m += m
        at_1 += one
        better += m and not one
        worse += one and not m
    p = stats.binomtest(better, better + worse, 0.5, alternative="greater").pvalue if better + worse else 1.0
    record_property("detail", f"both flagged: {at_m}/50 at alpha_m vs {at_1}/50 at alpha=1; sign test p = {p:.2g}")
    assert at_m > at_1
    assert p < 0.05


def test_10_analytic_generative_checks(record_property):
    x, y = generate_dataset(dataset2(n=100_000, seed=10))
    r_xy = np.corrcoef(x.values[:, 29], y.values[:, 0])[0, 1]
    _, y3 = generate_dataset(dataset3(n=100_000, seed=10))
    r_yy = np.corrcoef(y3.values[:, :15], rowvar=False)[0, 1:]
    # Y10 also carries X70, so Var(Y10) = 2 and cor(Y1, Y10) = 0.9 / 2
    want = np.full(14, 0.9 / math.sqrt(2))
    want[8] = 0.45
    dev = np.max(np.abs(r_yy - want))
    record_property(
        "detail",
        f"cor(X30,Y1) = {r_xy:.4f}; max |cor(Y1,Yj) - analytic| = {dev:.4f} for j=2..15 "
        f"(0.6364, except 0.45 at j=10: cor(Y1,Y10) = {r_yy[8]:.4f})",
    )
    assert abs(r_xy - 1 / math.sqrt(2)) <= 0.01
    assert dev <= 0.02


def test_11_cli_determinism(record_property, tmp_path):
    assert main(["simulate", "--preset", "dataset2", "--seed", "11", "--out", str(tmp_path / "d")]) == 0
    x, y = tmp_path / "d_X.csv", tmp_path / "d_Y.csv"
    files = {}
    for threads in (1, 2, 4):
        for run in (0, 1):
            out = tmp_path / f"t{threads}_{run}"
            argv = ["analyze", "--x", str(x), "--y", str(y), "--perms", "1000", "--threads", str(threads),
                    "--out", str(out)]
            assert main(argv) == 0
            files[threads, run] = ((tmp_path / f"t{threads}_{run}_report.json").read_bytes(),
                                   (tmp_path / f"t{threads}_{run}_contributions.svg").read_bytes())
    distinct = len(set(files.values()))
    record_property("detail", f"{len(files)} analyze runs over threads 1,2,4 gave {distinct} distinct output pair(s)")
    assert distinct == 1


def test_12_io_contract(record_property, tmp_path, data_dir):
    corpus = {"ragged.csv": RaggedRow, "non_numeric.csv": ParseError, "na_token.csv": MissingValue,
              "duplicate_header.csv": DuplicateName}
    rejected = 0
    for name, kind in corpus.items():
        with pytest.raises(kind) as info:
            load_matrix_csv(data_dir / "csv_errors" / name)
        rejected += info.value.row is not None

    x, y = generate_dataset(dataset2(n=80, seed=12))
    report = analyze(x, y, plan=PermutationPlan(300, seed=12))
    path = tmp_path / "r.json"
    write_report(report, path)
    back = read_report(path)
    exact = back == report and dumps_report(back) == path.read_text()
    floats_ok = json.loads(path.read_text())["test"]["p_values"] == list(report.test.p_values)

    svg = [contribution_plot_svg(report.profile) for _ in range(2)]
    stable = svg[0] == svg[1] == contribution_plot_svg(back.profile)
    record_property(
        "detail",
        f"{rejected}/{len(corpus)} malformed CSVs rejected with location; round trip exact: {exact and floats_ok}; "
        f"plot stable: {stable}",
    )
    assert rejected == len(corpus)
    assert exact and floats_ok
    assert stable

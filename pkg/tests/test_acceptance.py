"""End-to-end acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py`` (verdicts appear in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

sys.path.insert(0, str(Path(__file__).parent))
from acceptance_log import verdict  # noqa: E402

from ptcopula.copulas import CopulaModel, empirical_cdf, empirical_chi, stdf_estimate
from ptcopula.distributions import GpdExcess, NegBin
from ptcopula.estimation import fit_gpd_mle, fit_negbin_moments
from ptcopula.gpd_copula import GpdCopulaSpec, sample_gpd_copula
from ptcopula.loss_model import build_margins
from ptcopula.piecing_together import PtCopulaSpec, b_coefficients, sample_pt_copula
from ptcopula.presets import banking_scenario
from ptcopula.risk import TOTAL, es_hat, ms_hat, replicate_report, var_hat
from ptcopula.streams import substream

REFERENCE = {
    "l1_var95": 13_638.0,
    "l2_var95": 12_586.0,
    "l1_var99": (32_667.0 + 32_899.0) / 2,
    "total_var95_t": 25_428.0,
}
R = 50
SEED = 0
META_RUNS = 20
META_SEEDS = range(1000, 1000 + META_RUNS)
UNIFORM_01 = stats.uniform(-1, 1).cdf


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture(scope="module")
def paired_reports():
    start = time.perf_counter()
    plain = banking_scenario(seed=SEED)
    pt = banking_scenario(pt=True, seed=SEED)
    margins = build_margins(plain, threads=2)
    reports = replicate_report(plain, R, margins=margins), replicate_report(pt, R, margins=margins)
    return reports + (time.perf_counter() - start,)


def test_criterion_1_marginal_var(paired_reports):
    plain, _, elapsed = paired_reports
    got = {
        "l1_var95": plain.get("commercial", 0.95),
        "l2_var95": plain.get("retail", 0.95),
        "l1_var99": plain.get("commercial", 0.99),
    }
    tol = {"l1_var95": 0.15, "l2_var95": 0.15, "l1_var99": 0.25}
    ok = all(rel(got[k], REFERENCE[k]) <= tol[k] for k in got) and elapsed < 600
    detail = ", ".join(f"{k}={got[k]:.0f} ({rel(got[k], REFERENCE[k]):+.1%} off, tol {tol[k]:.0%})" for k in got)
    assert verdict(1, ok, f"{detail}; run {elapsed:.0f}s")


def test_criterion_2_total_var(paired_reports):
    plain = paired_reports[0]
    got = plain.get(TOTAL, 0.95)
    err = rel(got, REFERENCE["total_var95_t"])
    assert verdict(2, err <= 0.15, f"total VaR95 = {got:.0f} vs {REFERENCE['total_var95_t']:.0f} ({err:.1%}, tol 15%)")


def test_criterion_3_var_invariance(paired_reports):
    plain, pt, _ = paired_reports
    gaps = {
        (line, a): rel(pt.get(line, a), plain.get(line, a))
        for line in ("commercial", "retail") for a in (0.95, 0.99)
    }
    worst = max(gaps, key=gaps.get)
    assert verdict(3, gaps[worst] < 0.05, f"largest PT/plain VaR gap {gaps[worst]:.2%} at {worst} (tol 5%)")


@pytest.mark.slow
def test_criterion_4_es_direction():
    wins = []
    for seed in META_SEEDS:
        plain = banking_scenario(seed=seed)
        pt = banking_scenario(pt=True, seed=seed)
        margins = build_margins(plain, threads=2)
        a = replicate_report(plain, R, margins=margins).get(TOTAL, 0.95, "es")
        b = replicate_report(pt, R, margins=margins).get(TOTAL, 0.95, "es")
        wins.append(b > a)
    share = float(np.mean(wins))
    assert verdict(4, share >= 0.70, f"PT ES95(total) above plain in {sum(wins)}/{META_RUNS} meta-runs "
                                     f"({share:.0%}, need 70%)")


def test_criterion_5_gpd_copula():
    spec = GpdCopulaSpec(CopulaModel.independence())
    v = sample_gpd_copula(spec, 10**6, substream(5, 0))
    p = empirical_cdf(v, [-0.25, -0.25])
    ks = [stats.kstest(col, UNIFORM_01).statistic for col in v[: 10**5].T]
    ok = abs(p - 2 / 3) <= 0.005 and max(ks) < 0.01
    assert verdict(5, ok, f"P(V <= -1/4) = {p:.5f} (|err| {abs(p - 2 / 3):.5f}, tol 0.005); max KS {max(ks):.4f}")


def test_criterion_6_pt_operator():
    notes, ok = [], True
    n = 10**5
    # uniform margins under the production configuration
    prod = PtCopulaSpec(CopulaModel.student_t(0.76, 8.64), GpdCopulaSpec(CopulaModel.gaussian(0.7)),
                        [-0.0189, -0.0516])
    q = sample_pt_copula(prod, n, substream(6, 0)).q
    ks = max(stats.kstest(col, UNIFORM_01).statistic for col in q.T)
    ok &= ks < 0.01
    notes.append(f"KS {ks:.4f}")
    # coincidence below the threshold for two closed-form bases
    y = np.array([-0.2, -0.25])
    worst = 0.0
    for k, base in enumerate((CopulaModel.independence(), CopulaModel.clayton(2.0))):
        q = sample_pt_copula(PtCopulaSpec(base, GpdCopulaSpec(CopulaModel.gaussian(0.5)), y), n,
                             substream(6, 1, k)).q
        grid = np.array([[a, b] for a in np.linspace(-0.8, y[0], 4) for b in np.linspace(-0.8, y[1], 4)])
        exact = base.cdf(grid + 1)
        z = np.abs(empirical_cdf(q, grid) - exact) / np.sqrt(exact * (1 - exact) / n)
        worst = max(worst, float(z.max()))
    ok &= worst < 3
    notes.append(f"coincidence max {worst:.2f} SE")
    # exceedance identity and homogeneity with an independence base
    ind = CopulaModel.independence()
    spec = PtCopulaSpec(ind, GpdCopulaSpec(ind), [-0.3, -0.3])
    big = 10**6
    q = sample_pt_copula(spec, big, substream(6, 2)).q
    v = sample_gpd_copula(spec.gpd, big, substream(6, 3))
    b = b_coefficients(ind, spec.y, [0, 1])
    x = np.array([-0.05, -0.05])
    pq = np.mean(np.all(q >= x, axis=1))
    pv = np.mean(np.all(v >= np.array([b[0], b[1]]) * x, axis=1))
    z_exc = abs(pq - pv) / math.sqrt((pq * (1 - pq) + pv * (1 - pv)) / big)
    ok &= z_exc < 3
    notes.append(f"exceedance gap {z_exc:.2f} SE")
    x = np.array([-0.1, -0.1])
    base_p = np.mean(np.all(q > x, axis=1))
    for t in (0.25, 0.5):
        pt_ = np.mean(np.all(q > t * x, axis=1))
        z_h = abs(pt_ - t * base_p) / math.sqrt(pt_ / big + t * t * base_p / big)
        ok &= z_h < 3
        notes.append(f"homogeneity t={t}: {z_h:.2f} SE")
    assert verdict(6, ok, "; ".join(notes))


def test_criterion_7_estimators():
    x = np.arange(1.0, 101.0)
    rng = np.random.default_rng(7)
    ms_ok = all(
        ms_hat(s, a) == var_hat(s, (1 + a) / 2)
        for s in (rng.standard_cauchy(rng.integers(1, 500)) for _ in range(200))
        for a in (0.5, 0.9, 0.95, 0.99)
    )
    ok = es_hat(x, 0.95) == 117.0 and var_hat(x, 0.95) == 95.0 and ms_ok
    assert verdict(7, ok, f"es_hat={es_hat(x, 0.95)!r}, var_hat={var_hat(x, 0.95)!r}, ms identity {ms_ok}")


def test_criterion_8_fitting():
    notes, ok = [], True
    start = time.perf_counter()
    for k, (beta, xi) in enumerate(((609.84, 0.82), (99.75, 1.02))):
        excess = GpdExcess(beta, xi).quantile(substream(8, k).random(10**4))
        fit = fit_gpd_mle(excess)
        e = max(rel(fit.beta, beta), rel(fit.xi, xi))
        ok &= e <= 0.10
        notes.append(f"GPD({beta}, {xi}) worst {e:.1%}")
    for k, (alpha, r) in enumerate(((0.74, 46.10), (0.39, 162.04))):
        fit = fit_negbin_moments(NegBin(alpha, r).sample(10**5, substream(8, 10 + k)))
        e = max(rel(fit.alpha, alpha), rel(fit.r, r))
        ok &= e <= 0.05
        notes.append(f"NB({alpha}, {r}) worst {e:.1%}")
    elapsed = time.perf_counter() - start
    assert verdict(8, ok and elapsed < 60, "; ".join(notes) + f"; {elapsed:.1f}s")


def test_criterion_9_diagnostics():
    ind = CopulaModel.independence()
    errs = {t: abs(stdf_estimate(ind, [-1, -1], t) - 2.0) for t in (0.01, 0.001)}
    stdf_ok = all(e <= 2 * t for t, e in errs.items())
    chi = empirical_chi(CopulaModel.clayton(1.0).sample(10**6, substream(9, 0)), 0, 1, 0.999)
    assert verdict(9, stdf_ok and chi < 0.05,
                   "STDF errors " + ", ".join(f"t={t}: {e:.2e}" for t, e in errs.items()) + f"; Clayton chi {chi:.4f}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))

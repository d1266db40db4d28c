import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptcopula.distributions import GpdExcess, NegBin
from ptcopula.errors import DegenerateSampleError, FitInfeasibleError, InsufficientDataError
from ptcopula.estimation import (
    fit_gpd_mle, fit_lognormal_mle, fit_negbin_from_moments, fit_negbin_moments, gpd_loglik, mean_excess,
)


def gpd_draws(beta, xi, n, seed):
    return GpdExcess(beta, xi).quantile(np.random.default_rng(seed).random(n))


class TestGpdFit:
    @pytest.mark.parametrize("beta,xi", [(609.84, 0.82), (99.75, 1.02)])
    def test_recovery(self, beta, xi):
        fit = fit_gpd_mle(gpd_draws(beta, xi, 10**4, seed=17))
        assert fit.beta == pytest.approx(beta, rel=0.10)
        assert fit.xi == pytest.approx(xi, rel=0.10)

    def test_scale_equivariance(self):
        x = gpd_draws(50.0, 0.6, 2000, seed=2)
        a = fit_gpd_mle(x)
        b = fit_gpd_mle(7.5 * x)
        assert b.beta == pytest.approx(7.5 * a.beta, rel=1e-6)
        assert b.xi == pytest.approx(a.xi, rel=1e-6)

    def test_beats_random_pairs(self):
        x = gpd_draws(99.75, 1.02, 3000, seed=4)
        fit = fit_gpd_mle(x)
        best = gpd_loglik(x, fit.beta, fit.xi)
        rng = np.random.default_rng(5)
        for beta, xi in zip(rng.uniform(1, 500, 100), rng.uniform(0.01, 4, 100)):
            assert best >= gpd_loglik(x, beta, xi)

    def test_local_optimum(self):
        x = gpd_draws(10.0, 0.4, 5000, seed=6)
        fit = fit_gpd_mle(x)
        best = gpd_loglik(x, fit.beta, fit.xi)
        for db in (0.999, 1.001):
            for dx in (0.999, 1.001):
                assert best >= gpd_loglik(x, fit.beta * db, fit.xi * dx)

    def test_degenerate(self):
        with pytest.raises(DegenerateSampleError):
            fit_gpd_mle(np.full(50, 3.0))

    def test_too_few(self):
        with pytest.raises(InsufficientDataError):
            fit_gpd_mle(np.arange(1.0, 30.0))

    def test_nonpositive(self):
        x = gpd_draws(1.0, 0.5, 100, seed=1)
        x[3] = 0.0
        with pytest.raises(ValueError):
            fit_gpd_mle(x)


class TestLognormalFit:
    def test_hand_example(self):
        fit = fit_lognormal_mle([1.0, math.e**2])
        assert fit.mu == pytest.approx(1.0, rel=1e-14)
        assert fit.sigma == pytest.approx(1.0, rel=1e-14)

    def test_constant_is_degenerate(self):
        with pytest.raises(DegenerateSampleError) as info:
            fit_lognormal_mle([math.e] * 4)
        assert info.value.estimate["mu"] == pytest.approx(1.0)
        assert info.value.estimate["sigma"] == 0.0

    def test_recovery(self):
        x = np.random.default_rng(21).lognormal(2.19, 2.23, 10**5)
        fit = fit_lognormal_mle(x)
        assert fit.mu == pytest.approx(2.19, rel=0.02)
        assert fit.sigma == pytest.approx(2.23, rel=0.02)

    def test_domain(self):
        with pytest.raises(ValueError):
            fit_lognormal_mle([1.0, -2.0, 3.0])


class TestNegBinFit:
    def test_table_moments(self):
        fit = fit_negbin_from_moments(34.114, 1606.9)
        assert fit.alpha == pytest.approx(0.74, rel=1e-3)
        assert fit.r == pytest.approx(46.10, rel=1e-3)

    def test_hand_example(self):
        fit = fit_negbin_from_moments(1.0, 2.0)
        assert (fit.alpha, fit.r) == (pytest.approx(1.0), pytest.approx(1.0))

    def test_underdispersed(self):
        with pytest.raises(FitInfeasibleError, match="Poisson"):
            fit_negbin_from_moments(5.0, 4.0)

    def test_constant_counts(self):
        with pytest.raises(FitInfeasibleError, match="overdispersed"):
            fit_negbin_moments(np.full(100, 3))

    @settings(max_examples=100)
    @given(st.floats(0.01, 1e4), st.floats(1.001, 1e3))
    def test_round_trip(self, mean, ratio):
        var = mean * ratio
        fit = fit_negbin_from_moments(mean, var)
        assert fit.mean == pytest.approx(mean, rel=1e-12)
        assert fit.variance == pytest.approx(var, rel=1e-12)

    def test_from_counts_population_variance(self):
        c = np.array([0, 0, 1, 5, 9, 0, 2, 14])
        fit = fit_negbin_moments(c)
        assert fit.mean == pytest.approx(c.mean(), rel=1e-12)
        assert fit.variance == pytest.approx(c.var(), rel=1e-12)

    @pytest.mark.parametrize("alpha,r", [(0.74, 46.10), (0.39, 162.04)])
    def test_sample_recovery(self, alpha, r):
        counts = NegBin(alpha, r).sample(10**5, np.random.default_rng(33))
        fit = fit_negbin_moments(counts)
        assert fit.alpha == pytest.approx(alpha, rel=0.05)
        assert fit.r == pytest.approx(r, rel=0.05)


class TestMeanExcess:
    def test_hand_example(self):
        curve = mean_excess([1, 2, 3, 4, 5], [0, 2], min_exceedances=1)
        np.testing.assert_array_equal(curve.mean_excess, [3.0, 2.0])
        np.testing.assert_array_equal(curve.counts, [5, 3])

    def test_below_minimum(self):
        data = np.arange(10.0, 20.0)
        curve = mean_excess(data, [-4.0])
        assert curve.mean_excess[0] == pytest.approx(data.mean() + 4.0)

    def test_sparse_threshold_omitted(self):
        with pytest.warns(UserWarning, match="omitted"):
            curve = mean_excess([1, 2, 3, 4, 5], [0, 2])
        assert curve.omitted == [2.0]
        assert list(curve.thresholds) == [0.0]

    @given(st.floats(-1e3, 1e3))
    def test_translation(self, c):
        data = np.random.default_rng(1).exponential(2.0, 200)
        ts = [0.5, 1.0, 2.0]
        a = mean_excess(data, ts)
        b = mean_excess(data + c, np.array(ts) + c)
        np.testing.assert_allclose(a.mean_excess, b.mean_excess, rtol=1e-9, atol=1e-9)
        np.testing.assert_array_equal(a.counts, b.counts)

    def test_gpd_slope_positive(self):
        x = gpd_draws(5.0, 0.3, 10**5, seed=12)
        curve = mean_excess(x, np.quantile(x, np.linspace(0.1, 0.9, 9)))
        assert curve.slope() == pytest.approx(0.3 / 0.7, rel=0.25)
        assert curve.slope() > 0

import numpy as np
import pytest
from scipy import stats

from hgmwishart.dist import max_root_cdf, min_root_upper
from hgmwishart.errors import ParameterError
from hgmwishart.hgm import IntegratorConfig, ProblemSpec
from hgmwishart.oracle import (McEstimate, empirical_max_root_cdf, empirical_min_root_upper,
                               sample_roots, sample_wishart, sample_wishart_batch)


class TestWishart:
    def test_mean_is_scale(self):
        d = np.array([0.5, 2.0, 3.0])
        n, N = 7.0, 100_000
        W = sample_wishart_batch(n, d, N, np.random.default_rng(1))
        mean = W.mean(axis=0) / n
        # Var(W_ij) = n (s_ij^2 + s_ii s_jj) for diagonal scale
        sd = np.sqrt((np.diag(d) ** 2 + np.outer(d, d)) / (n * N))
        assert np.all(np.abs(mean - np.diag(d)) <= 4 * sd)

    def test_scalar_is_chi_square(self):
        w = sample_wishart_batch(5.5, [1.0], 50_000, np.random.default_rng(2))[:, 0, 0]
        assert stats.kstest(w, stats.chi2(5.5).cdf).pvalue > 1e-3

    def test_symmetric_positive_definite(self):
        W = sample_wishart(3, [1, 2, 3], np.random.default_rng(3))
        assert np.array_equal(W, W.T)
        assert np.all(np.linalg.eigvalsh(W) > 0)

    def test_deterministic(self):
        a = sample_wishart_batch(4, [1, 2], 10, 123)
        b = sample_wishart_batch(4, [1, 2], 10, 123)
        assert np.array_equal(a, b)

    def test_bad_arguments(self):
        with pytest.raises(ParameterError):
            sample_wishart(1.5, [1, 2], 0)
        with pytest.raises(ParameterError):
            sample_wishart(3, [1, -2], 0)


class TestEmpirical:
    def test_standard_error_formula(self):
        e = McEstimate.from_count(250, 1000, 0)
        assert e.probability == 0.25
        assert e.standard_error == pytest.approx(np.sqrt(0.25 * 0.75 / 1000))

    def test_reproducible_and_worker_independent(self):
        s = ProblemSpec(2, 5, 6, (1, 3))
        a = sample_roots(s, 45_000, seed=7)
        b = sample_roots(s, 45_000, seed=7, workers=3)
        assert np.array_equal(a, b)
        assert np.all(a[:, 0] >= a[:, 1])

    def test_scalar_median(self):
        (e,) = empirical_max_root_cdf(ProblemSpec(1, 2, 2, (1,)), [1.0], 100_000, seed=3)
        assert abs(e.probability - 0.5) <= 3 * e.standard_error

    def test_shared_draws_are_monotone(self):
        s = ProblemSpec(3, 10, 20, (1, 2, 3))
        est = empirical_max_root_cdf(s, np.geomspace(0.5, 200, 30), 20_000, seed=11)
        p = [e.probability for e in est]
        assert np.all(np.diff(p) >= 0)
        assert p[-1] > 0.99

    def test_independent_seeds_agree(self):
        s = ProblemSpec(2, 5, 6, (1, 3))
        a = empirical_max_root_cdf(s, [2.0, 6.0], 50_000, seed=1)
        b = empirical_max_root_cdf(s, [2.0, 6.0], 50_000, seed=2)
        for u, v in zip(a, b):
            pooled = np.hypot(u.standard_error, v.standard_error)
            assert abs(u.probability - v.probability) < 6 * pooled

    def test_matches_model(self):
        s = ProblemSpec(3, 10, 20, (1, 2, 3))
        xs = [5.0, 10.0, 20.0]
        model = max_root_cdf(s, xs, "auto", IntegratorConfig(series_error=1e-12))
        for e, p in zip(empirical_max_root_cdf(s, xs, 200_000, seed=1), model):
            assert abs(e.probability - p) <= 3 * e.standard_error

    def test_unbiased_across_seeds(self):
        # z-scores against the model should look standard normal across seeds
        s = ProblemSpec(3, 10, 20, (1, 2, 3))
        p = max_root_cdf(s, 5.0, "auto", IntegratorConfig(series_error=1e-12))
        n = 50_000
        z = [(empirical_max_root_cdf(s, [5.0], n, seed)[0].probability - p)
             / np.sqrt(p * (1 - p) / n) for seed in range(100, 130)]
        assert abs(np.mean(z)) <= 3 / np.sqrt(len(z))
        assert 0.5 <= np.std(z) <= 1.5

    def test_min_root_matches_model(self):
        s = ProblemSpec(2, 6, 8, (1, 2))
        xs = [0.2, 0.5, 1.0]
        model = min_root_upper(s, xs, "auto", IntegratorConfig(series_error=1e-12))
        for e, p in zip(empirical_min_root_upper(s, xs, 200_000, seed=5), model):
            assert abs(e.probability - p) <= 3 * e.standard_error

    def test_needs_enough_samples(self):
        with pytest.raises(ParameterError):
            empirical_max_root_cdf(ProblemSpec(1, 2, 2, (1,)), [1.0], 999, seed=0)

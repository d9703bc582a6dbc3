import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from hgmwishart.dist import (l1_density_khatri, max_root_cdf, min_root_upper, null_constantine,
                             null_venables, ratio_cdf_series, ratio_density,
                             venables_coefficients)
from hgmwishart.errors import (ConvergenceWarning, DiagonalSingularityError, DomainError,
                               ParameterError)
from hgmwishart.hgm import IntegratorConfig, ProblemSpec
from hgmwishart.special import log_beta_cdf_bound, log_multigamma


def printed_constantine(x):
    """The m=3, n1=6, n2=10 polynomial as printed for the Constantine form."""
    y = x / (1 + x)
    inner = (-Fraction(2, 143) * y**9 + Fraction(27, 143) * y**8 - Fraction(166, 143) * y**7
             + Fraction(9149, 2145) * y**6 - Fraction(113, 11) * y**5 + Fraction(184, 11) * y**4
             - Fraction(55, 3) * y**3 + 13 * y**2 - Fraction(27, 5) * y + 1)
    return 2145 * y**9 * inner


def rotation(theta):
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


class TestMultigamma:
    def test_examples(self):
        assert log_multigamma(1, 3.7) == pytest.approx(math.lgamma(3.7))
        assert log_multigamma(2, 1.5) == pytest.approx(math.log(math.pi / 2), rel=1e-14)
        assert log_multigamma(0, 2.0) == 0.0

    @given(st.integers(1, 5), st.floats(0.1, 30))
    def test_product_oracle(self, m, shift):
        a = (m - 1) / 2 + shift
        direct = math.pi ** (m * (m - 1) / 4) * math.prod(math.gamma(a - i / 2) for i in range(m))
        assert log_multigamma(m, a) == pytest.approx(math.log(direct), rel=1e-12, abs=1e-12)

    def test_pole(self):
        with pytest.raises(DomainError):
            log_multigamma(3, 1.0)

    def test_rayleigh_bound_dominates(self):
        s = ProblemSpec(2, 6, 8, (1, 2))
        for x in (0.1, 1.0, 5.0):
            assert math.exp(log_beta_cdf_bound(x, s.beta, s.n1, s.n2)) >= max_root_cdf(s, x)


class TestRatioDensity:
    def test_scalar_form(self):
        for u in (0.1, 1.0, 7.0):
            assert ratio_density([[u]], [[1.0]], 2, 2) == pytest.approx((1 + u) ** -2, rel=1e-13)

    def test_scalar_integrates_to_one(self):
        val, _ = integrate.quad(lambda u: ratio_density([[u]], [[1.5]], 5, 7), 0, np.inf,
                                epsabs=1e-12)
        assert val == pytest.approx(1.0, abs=1e-6)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0, 2 * math.pi))
    def test_orthogonal_invariance(self, theta):
        U = np.array([[1.2, 0.3], [0.3, 0.8]])
        S = np.array([[2.0, -0.4], [-0.4, 0.7]])
        Q = rotation(theta)
        base = ratio_density(U, S, 6, 5)
        assert ratio_density(Q @ U @ Q.T, Q @ S @ Q.T, 6, 5) == pytest.approx(base, rel=1e-10)

    def test_singular_boundary(self):
        assert ratio_density([[0.0, 0], [0, 1]], np.eye(2), 6, 5) == 0.0
        with pytest.raises(DomainError):
            ratio_density([[0.0, 0], [0, 1]], np.eye(2), 1.5, 5)


class TestRatioCdfSeries:
    def test_scalar_matches_quadrature(self):
        n1, n2, s2, w = 5.0, 7.0, 1.5, 0.3
        quad, _ = integrate.quad(lambda u: ratio_density([[u]], [[s2]], n1, n2), 0, w, epsabs=1e-14)
        assert ratio_cdf_series([[w]], [[s2]], n1, n2).value == pytest.approx(quad, rel=1e-7)

    def test_scaled_identity_is_max_root_cdf(self):
        # U = W2^-1/2 W1 W2^-1/2 with Sigma1 = I: beta = eigenvalues of Sigma2^-1
        S = np.diag([2.0, 3.0])
        x = 0.15
        got = ratio_cdf_series(x * np.eye(2), S, 6, 8, series_error=1e-14).value
        want = max_root_cdf(ProblemSpec(2, 6, 8, (0.5, 1 / 3)), x, "series",
                            IntegratorConfig(series_error=1e-14, max_degree=300))
        assert got == pytest.approx(want, rel=1e-9)

    def test_similarity_invariance(self):
        S = np.array([[1.0, 0.2], [0.2, 0.5]])
        O = np.array([[0.2, 0.05], [0.05, 0.1]])
        Q = rotation(0.7)
        a = ratio_cdf_series(O, S, 6, 8).value
        b = ratio_cdf_series(Q @ O @ Q.T, Q @ S @ Q.T, 6, 8).value
        assert a == pytest.approx(b, rel=1e-12)

    def test_vanishes_at_zero(self):
        assert ratio_cdf_series(np.zeros((2, 2)), np.eye(2), 6, 8).value == 0.0
        assert ratio_cdf_series(1e-6 * np.eye(2), np.eye(2), 6, 8).value < 1e-30


class TestNullForms:
    def test_venables_coefficients_printed(self):
        assert venables_coefficients(3, 6, 10) == [1, 9, 45, 165, 360, 531, 539, 330, 135, 30]

    @pytest.mark.parametrize("x", [0.1, 0.5, 1, 2, 5, 10])
    def test_constantine_matches_venables(self, x):
        assert abs(null_constantine(3, 6, 10, x) - null_venables(3, 6, 10, x)) <= 1e-12

    @pytest.mark.parametrize("x", [Fraction(1, 10), Fraction(1), Fraction(3), Fraction(10)])
    def test_constantine_matches_printed_polynomial(self, x):
        assert null_constantine(3, 6, 10, float(x)) == pytest.approx(
            float(printed_constantine(x)), abs=1e-10)

    def test_limits(self):
        assert null_constantine(3, 6, 10, 0.0) == 0.0
        assert null_venables(3, 6, 10, 0.0) == 0.0
        assert null_venables(3, 6, 10, 1e8) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("n1,n2", [(3, 5), (4.5, 7.0), (10, 3)])
    def test_scalar_is_f_distribution(self, n1, n2):
        for x in (0.2, 1.0, 4.0):
            want = stats.f.cdf(x * n2 / n1, n1, n2)
            assert null_constantine(1, n1, n2, x) == pytest.approx(want, rel=1e-10)

    def test_venables_rejects_fractional_r(self):
        with pytest.raises(ParameterError):
            null_venables(3, 6, 9, 1.0)
        with pytest.raises(ParameterError):
            null_venables(3, 6, 3, 1.0)

    def test_max_root_cdf_equal_beta(self):
        s = ProblemSpec(3, 6, 10, (1, 1, 1))
        cfg = IntegratorConfig(series_error=1e-15, max_degree=300)
        assert max_root_cdf(s, 1.0, "series", cfg) == pytest.approx(
            float(printed_constantine(Fraction(1))), abs=1e-10)
        assert max_root_cdf(s, 1.0) == pytest.approx(null_venables(3, 6, 10, 1.0), abs=1e-12)
        # equal beta != 1 rescales x
        s2 = ProblemSpec(3, 6, 10, (2, 2, 2))
        assert max_root_cdf(s2, 2.0) == pytest.approx(null_venables(3, 6, 10, 1.0), abs=1e-12)


class TestMaxRoot:
    def test_methods_agree(self):
        s = ProblemSpec(2, 6, 8, (1, 2))
        cfg = IntegratorConfig(series_error=1e-12)
        xs = np.array([0.5, 1.0, 2.0])
        ser = max_root_cdf(s, xs, "series", IntegratorConfig(series_error=1e-14, max_degree=400))
        hgm = max_root_cdf(s, xs, "hgm", cfg)
        assert np.allclose(ser, hgm, rtol=1e-7, atol=1e-12)
        assert max_root_cdf(s, 1e-4) < 1e-20

    def test_ties_need_series(self):
        s = ProblemSpec(2, 6, 8, (1, 1))
        with pytest.raises(DiagonalSingularityError):
            max_root_cdf(s, 1.0, "hgm")

    def test_bad_method_and_domain(self):
        s = ProblemSpec(2, 6, 8, (1, 2))
        with pytest.raises(ParameterError):
            max_root_cdf(s, 1.0, "magic")
        with pytest.raises(DomainError):
            max_root_cdf(s, -1.0)

    def test_unconverged_series_is_flagged(self):
        s = ProblemSpec(2, 6, 8, (1, 2))
        with pytest.warns(ConvergenceWarning):
            max_root_cdf(s, 5.0, "series", IntegratorConfig(max_degree=5))


class TestMinRoot:
    def test_duality(self):
        s = ProblemSpec(2, 6, 8, (1, 2))
        for x in (0.5, 1.0, 3.0):
            assert min_root_upper(s, x) == pytest.approx(max_root_cdf(s.swapped(), 1 / x), rel=1e-14)

    def test_near_zero_is_one(self):
        s = ProblemSpec(2, 6, 8, (1, 2))
        # the default series_error (1e-5) sets the relative accuracy of the whole curve
        assert min_root_upper(s, 1e-4) == pytest.approx(1.0, abs=1e-4)
        cfg = IntegratorConfig(series_error=1e-13)
        # the tail Pr(l_m < 1e-4) is about 2.3e-9
        assert min_root_upper(s, 1e-4, "auto", cfg) == pytest.approx(1.0, abs=1e-8)

    def test_scalar_is_f_survival(self):
        # m = 1: l = beta * (chi2_n1 / chi2_n2)
        s = ProblemSpec(1, 4, 6, (2.0,))
        for x in (0.5, 2.0):
            want = stats.f.sf(x / 2 * 6 / 4, 4, 6)
            assert min_root_upper(s, x) == pytest.approx(want, rel=1e-7)


class TestKhatri:
    @pytest.mark.parametrize("beta", [1.0, 2.5])
    def test_scalar_is_scaled_beta_prime(self, beta):
        s = ProblemSpec(1, 5, 7, (beta,))
        for x in (0.3, 1.0, 4.0):
            want = stats.betaprime.pdf(x / beta, 2.5, 3.5) / beta
            got = l1_density_khatri(s, x)
            assert got.converged
            assert got.value == pytest.approx(want, rel=1e-10)

    def test_integrates_to_cdf(self):
        s = ProblemSpec(2, 6, 8, (1, 2))
        cfg = IntegratorConfig(series_error=1e-12)
        val, _ = integrate.quad(lambda t: l1_density_khatri(s, t).value, 1e-9, 2.0, epsabs=1e-10)
        assert val == pytest.approx(max_root_cdf(s, 2.0, "auto", cfg), rel=1e-4)

    def test_small_x(self):
        assert l1_density_khatri(ProblemSpec(2, 6, 8, (1, 2)), 1e-5).value < 1e-20
        with pytest.raises(DomainError):
            l1_density_khatri(ProblemSpec(2, 6, 8, (1, 2)), 0.0)

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.utilities.iterables import partitions as sympy_partitions

from hgmwishart.symfun import (as_partition, conjugate, dominates, enumerate_partitions,
                               gen_pochhammer, monomial_eval, monomial_jets, subset_bits,
                               zonal_eval, zonal_expansion, zonal_partial_eval, zonal_table)


def rising(a, n):
    out = 1
    for j in range(n):
        out *= a + j
    return out


def zonal_at_identity(kappa, m):
    """Closed form of C_kappa(I_m) (Muirhead, Corollary 7.2.4)."""
    k, p = sum(kappa), len(kappa)
    num = Fraction(2) ** (2 * k) * math.factorial(k) * gen_pochhammer(Fraction(m, 2), kappa)
    for i in range(p):
        for j in range(i + 1, p):
            num *= 2 * kappa[i] - 2 * kappa[j] - (i + 1) + (j + 1)
    den = 1
    for i in range(p):
        den *= math.factorial(2 * kappa[i] + p - (i + 1))
    return num / den


def arrangements(lam, m):
    """m_lambda(1, ..., 1) in m variables."""
    count = math.comb(m, len(lam)) * math.factorial(len(lam))
    return count // math.prod(math.factorial(lam.count(v)) for v in set(lam))


xs = st.lists(st.floats(0.01, 0.99), min_size=1, max_size=4)


class TestPartitions:
    def test_small_listing_is_reverse_lex(self):
        assert enumerate_partitions(3, 3) == [(3,), (2, 1), (1, 1, 1)]
        assert enumerate_partitions(4, 2) == [(4,), (3, 1), (2, 2)]
        assert enumerate_partitions(0, 2) == [()]

    @given(st.integers(0, 14), st.integers(1, 6))
    def test_counts_match_sympy(self, k, m):
        expected = sum(1 for p in sympy_partitions(k, m=m)) if k else 1
        assert len(enumerate_partitions(k, m)) == expected

    @given(st.integers(1, 12), st.integers(1, 5), st.integers(1, 6))
    def test_max_part_cap(self, k, m, cap):
        got = enumerate_partitions(k, m, cap)
        want = [p for p in enumerate_partitions(k, m) if p[0] <= cap]
        assert got == want

    @given(st.integers(0, 12))
    def test_conjugate_is_involution(self, k):
        for p in enumerate_partitions(k, max(k, 1)):
            assert conjugate(conjugate(p)) == p
            assert sum(conjugate(p)) == k

    def test_dominance(self):
        assert dominates((3,), (2, 1))
        assert dominates((2, 1), (1, 1, 1))
        assert not dominates((2, 2), (3, 1))
        assert not dominates((3, 3), (4, 1, 1)) and not dominates((4, 1, 1), (3, 3))

    def test_as_partition_and_errors(self):
        assert as_partition([1, 0, 3, 2]) == (3, 2, 1)
        with pytest.raises(ValueError):
            as_partition([2, -1])
        with pytest.raises(ValueError):
            enumerate_partitions(-1, 2)


class TestPochhammer:
    @given(st.floats(-5, 5), st.integers(0, 6))
    def test_single_row_is_rising_factorial(self, a, n):
        assert gen_pochhammer(a, (n,) if n else ()) == pytest.approx(rising(a, n), rel=1e-12, abs=1e-12)

    def test_exact_values(self):
        # (a)_(2,1) = a (a+1) (a - 1/2)
        assert gen_pochhammer(Fraction(3), (2, 1)) == Fraction(3 * 4 * 5, 2)
        assert gen_pochhammer(3, (2, 1)) == Fraction(30)
        assert gen_pochhammer(1.0, (1, 1, 1)) == 0.0


class TestZonal:
    def test_frozen_low_degree_expansions(self):
        assert zonal_expansion((2,)).coefficients == {(2,): 1, (1, 1): Fraction(2, 3)}
        assert zonal_expansion((1, 1)).coefficients == {(1, 1): Fraction(4, 3)}
        assert zonal_expansion((2, 1)).coefficients == {(2, 1): Fraction(12, 5),
                                                        (1, 1, 1): Fraction(18, 5)}
        assert zonal_expansion((3,)).coefficients == {
            (3,): 1, (2, 1): Fraction(3, 5), (1, 1, 1): Fraction(2, 5)}

    @pytest.mark.parametrize("k", range(0, 9))
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_identity_values_match_closed_form(self, k, m):
        for kappa in enumerate_partitions(k, m):
            exact = sum(c * arrangements(lam, m)
                        for lam, c in zonal_expansion(kappa, m).coefficients.items())
            assert exact == zonal_at_identity(kappa, m)

    def test_single_variable_is_power(self):
        for k in range(1, 8):
            assert zonal_eval((k,), [0.7]) == pytest.approx(0.7**k, rel=1e-14)
            assert zonal_eval((k - 1, 1) if k > 1 else (1,), [0.7]) == (0.0 if k > 1 else 0.7)

    @settings(max_examples=40, deadline=None)
    @given(xs, st.integers(0, 8))
    def test_sum_identity(self, x, k):
        total = sum(zonal_eval(kappa, x) for kappa in enumerate_partitions(k, len(x)))
        assert total == pytest.approx(sum(x) ** k, rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(0.05, 0.95), min_size=2, max_size=3), st.integers(1, 6),
           st.data())
    def test_partials_match_finite_differences(self, x, k, data):
        kappa = data.draw(st.sampled_from(enumerate_partitions(k, len(x))))
        j = data.draw(st.integers(1, len(x)))
        h = 1e-6
        xp, xm = list(x), list(x)
        xp[j - 1] += h
        xm[j - 1] -= h
        fd = (zonal_eval(kappa, xp) - zonal_eval(kappa, xm)) / (2 * h)
        assert zonal_partial_eval(kappa, [j], x) == pytest.approx(fd, rel=1e-6, abs=1e-8)

    def test_mixed_partial_of_power_sum(self):
        # C_(1) = x1 + x2 + x3; d1 d2 of (tr X)^2 = 2
        x = [0.2, 0.3, 0.4]
        total = sum(zonal_partial_eval(kappa, [1, 2], x) for kappa in enumerate_partitions(2, 3))
        assert total == pytest.approx(2.0, rel=1e-14)

    @pytest.mark.parametrize("k,m", [(5, 3), (8, 4), (10, 2), (12, 3)])
    def test_float_table_matches_exact(self, k, m):
        parts, table = zonal_table(k, m)
        assert not table.flags.writeable
        for r, kappa in enumerate(parts):
            exact = zonal_expansion(kappa, m).coefficients
            for c, lam in enumerate(parts):
                assert table[r, c] == pytest.approx(float(exact.get(lam, 0)), rel=1e-12, abs=1e-14)

    def test_too_many_parts_vanish(self):
        assert zonal_eval((1, 1, 1), [0.5, 0.5]) == 0.0
        assert zonal_partial_eval((1, 1, 1), [1], [0.5, 0.5]) == 0.0


class TestMonomials:
    def test_monomial_eval(self):
        assert monomial_eval((2, 1), [1.0, 2.0, 3.0]) == pytest.approx(
            1 * 2 + 1 * 3 + 4 * 1 + 4 * 3 + 9 * 1 + 9 * 2)
        assert monomial_eval((1, 1, 1, 1), [1.0, 2.0]) == 0.0

    def test_jets_column_zero_is_value(self):
        x = [0.3, 0.5, 0.8]
        parts = enumerate_partitions(4, 3)
        jets = monomial_jets(parts, x)
        for r, lam in enumerate(parts):
            assert jets[r, 0] == pytest.approx(monomial_eval(lam, x), rel=1e-14)
        # d1 d2 d3 of m_(1,1,1) = 1
        assert monomial_jets([(1, 1, 1)], x)[0, 0b111] == pytest.approx(1.0)

    def test_subset_bits(self):
        assert subset_bits([]) == 0
        assert subset_bits([1, 3]) == 0b101
        with pytest.raises(ValueError):
            subset_bits([0])
        with pytest.raises(ValueError):
            subset_bits([2, 2])

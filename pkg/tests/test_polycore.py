import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sossparse.errors import DomainError, MissingVariableError
from sossparse.polycore import (
    Monomial,
    Polynomial,
    gaussian_moment_tensor,
    hermite_shift_expectation,
    integrate_interval,
    legendre,
    poly_arith,
    shifted_gaussian_raw_moment,
    tensor_apply_power,
    univariate,
)

x = Polynomial.variable(0)
y = Polynomial.variable(1)


class TestPolyArith:
    def test_difference_of_squares(self):
        assert (x + 1) * (x - 1) == x * x - 1

    def test_evaluate(self):
        p = x * x + y
        assert p.evaluate({0: 2.0, 1: 3.0}) == 7.0

    def test_substitute(self):
        p = x * x
        q = p.substitute({0: 2 * y})
        assert q == 4 * y * y

    def test_evaluate_missing_variable(self):
        with pytest.raises(MissingVariableError):
            (x + y).evaluate({0: 1.0})

    def test_product_degree(self):
        a = x * x + 1
        b = y * y * y
        assert poly_arith(a, b, "mul").degree == a.degree + b.degree

    def test_zero_coefficients_pruned(self):
        p = x - x
        assert p.is_zero()
        assert Monomial.var(0) not in (x + y - x).terms


class TestMonomialOrder:
    @given(
        st.lists(
            st.tuples(st.integers(0, 4), st.integers(1, 3)), max_size=3
        ),
        st.lists(st.tuples(st.integers(0, 4), st.integers(1, 3)), max_size=3),
    )
    @settings(max_examples=200, deadline=None)
    def test_total_order(self, pa, pb):
        a = Monomial(dict(pa))
        b = Monomial(dict(pb))
        assert sum([a < b, a == b, b < a]) == 1
        if a.degree < b.degree:
            assert a < b

    def test_graded(self):
        assert Monomial({0: 1}) < Monomial({0: 2})
        assert Monomial({1: 2}) < Monomial({0: 1, 1: 2})

    def test_lex_within_degree(self):
        # x0^2 > x0 x1 > x1^2 in lex on ids
        m200 = Monomial({0: 2})
        m110 = Monomial({0: 1, 1: 1})
        m020 = Monomial({1: 2})
        assert m020 < m110 < m200


class TestLegendre:
    def test_first_two(self):
        assert legendre(0) == Polynomial.constant(1.0)
        assert legendre(1) == x

    def test_p2_closed_form(self):
        assert legendre(2) == univariate([-0.5, 0.0, 1.5])

    def test_p2_norm(self):
        val = integrate_interval(legendre(2) * legendre(2))
        assert val == pytest.approx(2.0 / 5.0, abs=1e-14)

    @pytest.mark.parametrize("i", range(13))
    @pytest.mark.parametrize("j", range(13))
    def test_orthogonality(self, i, j):
        val = integrate_interval(legendre(i) * legendre(j))
        expect = 2.0 / (2 * i + 1) if i == j else 0.0
        assert val == pytest.approx(expect, abs=1e-10)


class TestHermiteShift:
    def test_j0(self):
        assert hermite_shift_expectation(0, 5.0) == 1.0

    def test_j2(self):
        assert hermite_shift_expectation(2, 1.0) == pytest.approx(1.0 / math.sqrt(2.0))

    def test_odd_at_zero(self):
        assert hermite_shift_expectation(3, 0.0) == 0.0


class TestShiftedGaussianMoments:
    def test_variance(self):
        assert shifted_gaussian_raw_moment(2, 0.0, 1.0) == 1.0

    def test_fourth(self):
        assert shifted_gaussian_raw_moment(4, 0.0, 1.0) == 3.0

    def test_mean(self):
        assert shifted_gaussian_raw_moment(1, 0.3, 2.0) == pytest.approx(0.3)

    def test_against_quadrature(self):
        from scipy.integrate import quad

        mu, var, n = 0.7, 1.3, 5
        val, _ = quad(
            lambda t: t**n * np.exp(-((t - mu) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var),
            -30,
            30,
        )
        assert shifted_gaussian_raw_moment(n, mu, var) == pytest.approx(val, rel=1e-9)


class TestIsserlis:
    def test_identity_order2(self):
        t = gaussian_moment_tensor(np.eye(2), 2)
        assert t[(0, 0)] == 1.0
        assert t[(1, 1)] == 1.0
        assert t[(0, 1)] == 0.0

    def test_order4_entry(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(2, 2))
        sigma = a @ a.T + np.eye(2)
        t = gaussian_moment_tensor(sigma, 4)
        expect = sigma[0, 0] * sigma[1, 1] + 2 * sigma[0, 1] ** 2
        assert t[(0, 0, 1, 1)] == pytest.approx(expect)

    def test_directional_contraction(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(3, 3))
        sigma = a @ a.T + 0.5 * np.eye(3)
        t = gaussian_moment_tensor(sigma, 4)
        v = rng.normal(size=3)
        quad_form = float(v @ sigma @ v)
        assert tensor_apply_power(t, v) == pytest.approx(3.0 * quad_form**2, rel=1e-10)

    def test_odd_order_rejected(self):
        with pytest.raises(DomainError):
            gaussian_moment_tensor(np.eye(2), 3)

    def test_non_psd_rejected(self):
        with pytest.raises(DomainError):
            gaussian_moment_tensor(np.array([[1.0, 2.0], [2.0, 1.0]]), 2)

    def test_permutation_lookup(self):
        t = gaussian_moment_tensor(np.array([[2.0, 0.3], [0.3, 1.0]]), 4)
        assert t[(0, 1, 0, 1)] == t[(1, 1, 0, 0)]
        assert t[(1, 0, 0, 0)] == t[(0, 0, 0, 1)]

    def test_monte_carlo_agreement(self):
        # d<=3, t<=4, n=1e6: every entry within 4 standard errors
        rng = np.random.default_rng(7)
        a = rng.normal(size=(3, 3)) * 0.5
        sigma = a @ a.T + np.eye(3)
        t = gaussian_moment_tensor(sigma, 4)
        n = 10**6
        xs = rng.multivariate_normal(np.zeros(3), sigma, size=n)
        for idx in t.sorted_indices():
            prods = xs[:, idx[0]] * xs[:, idx[1]] * xs[:, idx[2]] * xs[:, idx[3]]
            mean = prods.mean()
            se = prods.std(ddof=1) / np.sqrt(n)
            assert abs(mean - t[idx]) < 4 * se + 1e-12

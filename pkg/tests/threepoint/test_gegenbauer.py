"""Tests for normalized Gegenbauer polynomials."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.threepoint.errors import DomainError
from src.threepoint.gegenbauer import GegenbauerParams, gegenbauer_all, gegenbauer_eval


class TestClosedForms:
    def test_degree_zero(self):
        assert gegenbauer_eval(0, 7, -0.3) == 1.0

    def test_degree_one(self):
        assert gegenbauer_eval(1, 5, 0.42) == 0.42

    @pytest.mark.parametrize("h", range(2, 11))
    def test_degree_two(self, h, rng):
        """P_2^h(x) = (h x^2 - 1)/(h - 1)."""
        x = rng.uniform(-1.0, 1.0, size=1000)
        expected = (h * x**2 - 1.0) / (h - 1.0)
        assert np.max(np.abs(gegenbauer_eval(2, h, x) - expected)) <= 1e-13

    def test_chebyshev_at_h2(self):
        """h = 2 is Chebyshev T_m(x) = cos(m arccos x)."""
        x = np.linspace(-1.0, 1.0, 101)
        for m in range(8):
            assert np.allclose(gegenbauer_eval(m, 2, x), np.cos(m * np.arccos(x)), atol=1e-12)

    def test_legendre_at_h3(self):
        """h = 3 is Legendre: P_3(x) = (5x^3 - 3x)/2."""
        assert gegenbauer_eval(3, 3, 0.5) == pytest.approx((5 * 0.125 - 1.5) / 2, abs=1e-15)


class TestGegenbauerAll:
    def test_at_one(self):
        assert gegenbauer_all(2, 4, 1.0) == pytest.approx([1.0, 1.0, 1.0], abs=1e-15)

    def test_legendre_at_zero(self):
        """(3 * 0 - 1) / 2 = -1/2."""
        assert gegenbauer_all(2, 3, 0.0) == [1.0, 0.0, -0.5]

    def test_degree_one_only(self):
        assert gegenbauer_all(1, 5, -0.3) == [1.0, -0.3]

    def test_matches_single_evaluations(self, rng):
        x = rng.uniform(-1.0, 1.0, size=50)
        values = gegenbauer_all(6, 6, x)
        for m, row in enumerate(values):
            assert np.array_equal(row, gegenbauer_eval(m, 6, x))


class TestInvariants:
    @pytest.mark.parametrize("h", range(2, 13))
    def test_value_at_one(self, h):
        for m, value in enumerate(gegenbauer_all(20, h, 1.0)):
            assert abs(value - 1.0) <= 1e-14, (m, h)

    @settings(max_examples=200, deadline=None)
    @given(
        m=st.integers(min_value=0, max_value=20),
        h=st.integers(min_value=2, max_value=12),
        x=st.floats(min_value=-1.0, max_value=1.0),
    )
    def test_bounded_by_one(self, m, h, x):
        assert abs(gegenbauer_eval(m, h, x)) <= 1.0 + 1e-12

    @settings(max_examples=200, deadline=None)
    @given(
        m=st.integers(min_value=0, max_value=20),
        h=st.integers(min_value=2, max_value=12),
        x=st.floats(min_value=-1.0, max_value=1.0),
    )
    def test_parity(self, m, h, x):
        assert gegenbauer_eval(m, h, -x) == pytest.approx(
            (-1) ** m * gegenbauer_eval(m, h, x), abs=1e-12
        )


class TestDomain:
    @pytest.mark.parametrize("m, h", [(-1, 3), (2, 1), (0, 0)])
    def test_bad_parameters(self, m, h):
        with pytest.raises(DomainError):
            gegenbauer_eval(m, h, 0.0)
        with pytest.raises(DomainError):
            GegenbauerParams(m, h)

    def test_argument_outside_interval(self):
        with pytest.raises(DomainError):
            gegenbauer_eval(2, 3, 1.001)
        with pytest.raises(DomainError):
            gegenbauer_eval(2, 3, math.nan)

    def test_slack_at_boundary(self):
        assert gegenbauer_eval(2, 3, 1.0 + 1e-13) == pytest.approx(1.0, abs=1e-12)

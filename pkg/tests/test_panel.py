import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csdex import (
    BracketPower,
    Panel,
    bracket_pow,
    bracket_pow_k,
    bracket_pow_round,
    bracket_shift,
    v_nt,
)
from csdex.errors import InvalidLagError


class TestBracketPow:
    def test_identity_exponent(self):
        assert bracket_pow(200, 1.0) == 200

    def test_200_to_08(self):
        # integer oracle: 1/0.8 = 5/4, so k <= 200^0.8 < k+1 iff k^5 <= 200^4 < (k+1)^5
        assert 69**5 <= 200**4 < 70**5
        assert bracket_pow(200, 0.8) == 69

    def test_negative_exponent_is_reciprocal(self):
        assert bracket_pow(200, -0.8) == Fraction(1, 69)

    def test_exact_integer_powers_not_flipped(self):
        assert bracket_pow(100, 0.5) == 10
        assert bracket_pow(4, 0.5) == 2
        assert bracket_pow(1000, 1.0 / 3.0) == 9  # 1/3 in floats is below 1/3
        assert bracket_pow(10**12, 0.5) == 10**6

    def test_rounded_variant(self):
        assert bracket_pow_round(200, 0.2) == 3
        assert bracket_pow_round(200, 0.5) == 14
        assert bracket_pow_round(100, 0.5) == 10

    def test_zero_exponent(self):
        assert bracket_pow(7, 0.0) == 1

    def test_composites_are_powers_of_the_bracket(self):
        base = bracket_pow(200, 0.8)
        assert bracket_pow_k(200, 0.8, 2) == base**2
        assert bracket_pow_k(200, 0.8, 4) == base**4
        assert bracket_shift(200, 0.8, 2) == Fraction(base, 200**2)

    def test_invalid_base(self):
        with pytest.raises(ValueError):
            bracket_pow(0, 0.5)

    @given(st.integers(2, 10_000), st.floats(0.0, 3.0, allow_nan=False))
    @settings(max_examples=80, deadline=None)
    def test_floor_bound(self, n, a):
        k = bracket_pow(n, a)
        # k <= n^a < k+1, checked in logs with a safety margin well above
        # the float error of math.log
        assert k >= 1
        assert k * math.exp(-1e-9) <= math.exp(a * math.log(n)) * (1 + 1e-12)

    @given(st.integers(2, 5_000), st.floats(0.01, 2.0), st.floats(0.0, 0.5))
    @settings(max_examples=80, deadline=None)
    def test_monotone_in_exponent(self, n, a, bump):
        assert bracket_pow(n, a + bump) >= bracket_pow(n, a)

    @given(st.integers(2, 5_000), st.floats(0.01, 2.0))
    @settings(max_examples=80, deadline=None)
    def test_product_with_reciprocal(self, n, a):
        product = bracket_pow(n, a) * bracket_pow(n, -a)
        assert product <= 1
        assert product == 1  # reciprocal is exact by definition


class TestBracketPowerType:
    def test_value_methods(self):
        bp = BracketPower(200, 0.8)
        assert bp.value() == 69
        assert bp.value_k(2) == 69**2
        assert bp.value_shift(2) == Fraction(69, 40000)


class TestVnt:
    @pytest.mark.parametrize(
        "cutoff,t,tau,expected",
        [(69, 200, 1, 69), (199, 200, 10, 190), (190, 200, 10, 190)],
    )
    def test_examples(self, cutoff, t, tau, expected):
        assert v_nt(cutoff, t, tau) == expected

    def test_bounds(self):
        assert v_nt(5, 10, 3) <= 5
        assert v_nt(5, 10, 3) <= 7
        assert v_nt(7, 10, 3) == v_nt(7, 10, 3)

    def test_invalid_lag(self):
        with pytest.raises(InvalidLagError):
            v_nt(5, 10, 10)

    def test_invalid_cutoff(self):
        with pytest.raises(ValueError):
            v_nt(0, 10, 1)


class TestPanel:
    def test_shape_and_accessors(self):
        p = Panel([[1.0, 2.0], [3.0, 4.0]])
        assert p.shape == (2, 2)
        assert p.n_sections == 2
        assert p.n_times == 2

    def test_rejects_small_panels(self):
        with pytest.raises(ValueError):
            Panel([[1.0, 2.0]])
        with pytest.raises(ValueError):
            Panel([[1.0], [2.0]])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError, match="section 2, time 1"):
            Panel([[1.0, 2.0], [np.nan, 4.0]])

    def test_immutable(self):
        p = Panel([[1.0, 2.0], [3.0, 4.0]])
        with pytest.raises(AttributeError):
            p.data = np.zeros((2, 2))
        with pytest.raises(ValueError):
            p.data[0, 0] = 5.0

    def test_does_not_alias_input(self):
        raw = np.ones((2, 3))
        p = Panel(raw)
        raw[0, 0] = 99.0
        assert p.data[0, 0] == 1.0

    def test_label_validation(self):
        with pytest.raises(ValueError):
            Panel(np.ones((2, 3)), section_labels=["a"])
        p = Panel(np.ones((2, 3)), section_labels=["a", "b"], time_labels=[1, 2, 3])
        assert p.section_labels == ("a", "b")
        assert p.time_labels == (1, 2, 3)

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from st_lab.exact import CubeRootMultiple, icbrt_ceil, icbrt_floor, parse_rational


def test_parse_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-2") == -2
    assert parse_rational("0.25") == Fraction(1, 4)
    with pytest.raises((TypeError, ValueError)):
        parse_rational(0.25)


@given(st.integers(0, 10**30))
def test_integer_cube_roots(k):
    f = icbrt_floor(k)
    assert f**3 <= k < (f + 1) ** 3
    c = icbrt_ceil(k)
    assert (c - 1) ** 3 < k <= c**3 or (k == 0 and c == 0)


@given(st.fractions(min_value=0, max_value=100, max_denominator=50),
       st.fractions(min_value=Fraction(1, 50), max_value=10**6, max_denominator=50),
       st.integers(0, 500))
def test_comparison_matches_cubes(coef, rad, k):
    x = CubeRootMultiple(coef, rad)
    # k < coef * rad^(1/3)  iff  k^3 < coef^3 rad
    assert (k < x) == (k**3 < coef**3 * rad)
    assert (k == x) == (k**3 == coef**3 * rad)


def test_ceil_and_text():
    x = CubeRootMultiple(Fraction(1, 2), 64)  # exactly 2
    assert x == 2 and x.ceil() == 2
    y = CubeRootMultiple(1, 2)
    assert y.ceil() == 2 and math.isclose(float(y), 2 ** (1 / 3))
    assert str(y) == "1*cbrt(2)"

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from wallach_flow.core import GwsParams


def fr(s: str) -> Fraction:
    return Fraction(s)


EXAMPLE1 = GwsParams(Fraction(5, 26), Fraction(2, 13), Fraction(3, 26))
EXAMPLE2 = GwsParams(Fraction(5, 24), Fraction(1, 6), Fraction(1, 8))

# rationals strictly inside (0, 1/2) with modest denominators
rational_a = st.builds(
    lambda n, d: Fraction(n, d),
    st.integers(1, 199), st.just(400),
).filter(lambda f: 0 < f < Fraction(1, 2))

float_a = st.floats(0.01, 0.49, allow_nan=False)

params_exact = st.builds(GwsParams, rational_a, rational_a, rational_a)
params_float = st.builds(GwsParams, float_a, float_a, float_a)


@pytest.fixture
def ex1():
    return EXAMPLE1

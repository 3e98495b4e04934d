"""Shared hypothesis strategies."""
from fractions import Fraction

from hypothesis import strategies as st

from trinion.surface import ParamPoint

rationals = st.builds(Fraction, st.integers(-40, 40), st.integers(1, 12))


def _regular(st_pair):
    s, t = st_pair
    return s * t - s ** 3 - 1 != 0


param_points = st.tuples(rationals, rationals).filter(_regular).map(lambda p: ParamPoint(*p))

"""Hypothesis strategies for scalars, Tate elements and operators."""

from fractions import Fraction

from hypothesis import strategies as st

from tate_derham.algebra.scalars import LaurentScalar
from tate_derham.algebra.tate import TateElement
from tate_derham.algebra.weyl import WeylOperator

PRECISION = 8

digits = st.fractions(min_value=-4, max_value=4, max_denominator=3)
nonzero_digits = digits.filter(bool)


@st.composite
def scalars(draw, precision: int = PRECISION) -> LaurentScalar:
    """Nonzero scalars with a random unit part of relative precision ``precision``."""
    head = draw(nonzero_digits)
    tail = draw(st.lists(digits, min_size=precision - 1, max_size=precision - 1))
    return LaurentScalar(draw(st.integers(-3, 3)), (head, *tail))


@st.composite
def tate_elements(draw, var_count: int = 1, precision: int = PRECISION) -> TateElement:
    """Nonzero elements with up to three terms of x-degree at most two per variable."""
    shift = draw(st.integers(-1, 1))
    monomials = st.tuples(*[st.integers(0, 2)] * var_count)
    series = st.dictionaries(st.integers(shift, shift + 2), nonzero_digits, min_size=1, max_size=2)
    terms = draw(st.dictionaries(monomials, series, min_size=1, max_size=3))
    leading = sorted(terms)[0]
    terms[leading] = {**terms[leading], shift: Fraction(1)}
    return TateElement.build(var_count, terms, shift + precision)


@st.composite
def weyl_operators(draw, var_count: int = 1, precision: int = PRECISION) -> WeylOperator:
    """Nonzero operators of order at most one in each derivation."""
    indices = st.tuples(*[st.integers(0, 1)] * var_count)
    terms = draw(st.dictionaries(indices, tate_elements(var_count, precision), min_size=1, max_size=3))
    return WeylOperator.build(var_count, terms, min(f.absprec for f in terms.values()))

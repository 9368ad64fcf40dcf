"""Tests for left Groebner bases and characteristic varieties."""

import pytest
from hypothesis import given
from hypothesis import settings as hypothesis_settings
from hypothesis import strategies as st
from tests.strategies import PRECISION, nonzero_digits, weyl_operators

from tate_derham.algebra.scalars import LaurentScalar
from tate_derham.algebra.weyl import WeylOperator, multiply
from tate_derham.errors import UnsupportedCoefficients
from tate_derham.groebner import (
    ExactOperator,
    FilteredPresentation,
    initial_ideal,
    is_holonomic,
    is_unit_ideal,
    krull_dimension,
    left_buchberger,
)


@pytest.fixture
def presentation(weyl):
    """Fixture building a cyclic presentation from relation sources."""

    def build(relations: list[str], var_count: int = 1) -> FilteredPresentation:
        return FilteredPresentation.cyclic(var_count, [weyl(r, var_count) for r in relations])

    return build


class TestExactOperator:
    """Test the exact representation of operators"""

    def test_from_weyl(self, weyl):
        """Test that the normal form carries over"""
        p = ExactOperator.from_weyl(weyl("d1*x1"))

        assert p.to_source() == "x1*d1 + (1)"
        assert p.leading_key == ((1,), (1,))

    def test_rational_coefficients(self, weyl):
        """Test that Laurent coefficients become rational functions"""
        p = ExactOperator.from_weyl(weyl("d1 - t^-1"))

        assert p.to_source() == "d1 + (-1/t)"

    def test_zero_is_refused(self, weyl):
        """Test that a relation vanishing at its precision is refused"""
        with pytest.raises(UnsupportedCoefficients):
            ExactOperator.from_weyl(weyl("x1") - weyl("x1"))

    def test_initial_form(self, weyl):
        """Test that initial forms keep the top order part only"""
        p = ExactOperator.from_weyl(weyl("1 - t*d1"))

        assert str(p.initial_form().as_expr()) == "xi1"


class TestBuchberger:
    """Test left Buchberger"""

    def test_independent_relations(self, weyl):
        """Test that d1 and x2 already form a basis"""
        basis = left_buchberger([weyl("d1", 2), weyl("x2", 2)])

        assert [g.to_source() for g in basis] == ["x2", "d1"]
        assert sorted(str(p.as_expr()) for p in initial_ideal(basis)) == ["x2", "xi1"]

    def test_principal(self, weyl):
        """Test that a single relation stays principal"""
        basis = left_buchberger([weyl("d1 - t^-1")])

        assert len(basis) == 1
        assert not is_unit_ideal(basis)

    def test_unit_ideal(self, weyl):
        """Test that x1 and d1 generate the unit ideal"""
        basis = left_buchberger([weyl("x1"), weyl("d1")])

        assert is_unit_ideal(basis)
        assert [g.to_source() for g in basis] == ["(1)"]


class TestKrullDimension:
    """Test Krull dimensions of initial ideals"""

    def test_zero_ideal(self):
        """Test the dimension of the full symbol space"""
        assert krull_dimension([], 1) == 2
        assert krull_dimension([], 2) == 4

    @pytest.mark.parametrize(
        "relations,var_count,expected",
        [
            (["d1"], 1, 1),
            (["x1*d1"], 2, 3),
            (["d1", "x2"], 2, 2),
            (["d1", "d2"], 2, 2),
        ],
    )
    def test_dimension(self, weyl, relations, var_count, expected):
        """Test dimensions of characteristic varieties"""
        basis = left_buchberger([weyl(r, var_count) for r in relations])

        assert krull_dimension(initial_ideal(basis), var_count) == expected


class TestHolonomic:
    """Test holonomicity reports"""

    def test_pushed_structure_sheaf(self, presentation):
        """Test D2/(D2 d1 + D2 x2)"""
        report = is_holonomic(presentation(["d1", "x2"], 2))

        assert report.char_dimension == 2
        assert report.holonomic
        assert report.bernstein_bound_ok
        assert report.principal_symbol_agrees is None

    def test_unit_ideal(self, presentation):
        """Test that D1/(x1, d1) is the zero module"""
        report = is_holonomic(presentation(["x1", "d1"]))

        assert report.zero_module
        assert report.holonomic
        assert report.char_dimension == -1
        assert report.initial_ideal_generators == [["1"]]

    def test_completed_unit_in_two_variables(self, presentation):
        """Test that D2/D2(1 - t d1) is not holonomic"""
        report = is_holonomic(presentation(["1 - t*d1"], 2))

        assert report.char_dimension == 3
        assert not report.holonomic
        assert report.bernstein_bound_ok

    def test_completed_unit_on_the_disc(self, presentation):
        """Test that D1/D1(1 - t d1) is holonomic with the expected symbol"""
        report = is_holonomic(presentation(["1 - t*d1"]))

        assert report.char_dimension == 1
        assert report.holonomic
        assert report.principal_symbol_agrees

    def test_principal_symbol(self, presentation):
        """Test that the initial ideal of x d - 1 is generated by its symbol"""
        report = is_holonomic(presentation(["x1*d1 - 1"]))

        assert report.principal_symbol_agrees
        assert report.initial_ideal_generators == [["x1*xi1"]]

    def test_direct_sum(self, weyl):
        """Test that the dimension of a sum is the largest among nonzero components"""
        p = FilteredPresentation(1, ((weyl("d1"),), (weyl("x1"), weyl("d1"))))
        report = is_holonomic(p)

        assert report.char_dimension == 1
        assert not report.zero_module
        assert len(report.groebner_basis) == 2

    def test_serialized_report(self, presentation):
        """Test the aliases of the serialized report"""
        payload = is_holonomic(presentation(["d1"])).model_dump(by_alias=True, mode="json")

        assert payload["charDimension"] == 1
        assert payload["varCount"] == 1
        assert payload["zeroModule"] is False

    @hypothesis_settings(max_examples=20)
    @given(st.lists(weyl_operators(1), min_size=1, max_size=2), nonzero_digits, st.integers(-2, 2))
    def test_left_scalar_multiple(self, relations, digit, shift):
        """Test that multiplying the relations on the left by a scalar keeps the report"""
        c = WeylOperator.scalar(LaurentScalar.from_fraction(digit, PRECISION, shift), 1)
        report = is_holonomic(FilteredPresentation.cyclic(1, relations))
        scaled = is_holonomic(FilteredPresentation.cyclic(1, [multiply(c, p) for p in relations]))

        assert scaled.char_dimension == report.char_dimension
        assert scaled.holonomic == report.holonomic
        assert scaled.zero_module == report.zero_module

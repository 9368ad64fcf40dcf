"""Tests for the operator expression parser."""

from fractions import Fraction

import pytest
from hypothesis import given

from tate_derham.errors import IndexOutOfRange, OperatorSyntaxError
from tate_derham.parser import (
    BinaryOp,
    Literal,
    Negate,
    Parameter,
    Power,
    Variable,
    parse_operator,
    parse_tate,
    parse_weyl,
    tokenize,
)
from tests.strategies import weyl_operators

PRECISION = 8


class TestTokenize:
    """Test the tokenizer"""

    def test_tokens(self):
        """Test token kinds and positions"""
        tokens = tokenize("2*x1 + d12")

        assert [(t.kind, t.text, t.position) for t in tokens] == [
            ("nat", "2", 0),
            ("*", "*", 1),
            ("x", "1", 2),
            ("+", "+", 5),
            ("d", "12", 7),
            ("end", "", 10),
        ]

    def test_unexpected_character(self):
        """Test that unknown characters are located"""
        with pytest.raises(OperatorSyntaxError) as err:
            tokenize("1 $ 2")

        assert err.value.position == 2


class TestParseOperator:
    """Test the expression tree"""

    def test_unary_minus(self):
        """Test that unary minus binds looser than powers"""
        assert parse_operator("-x1^2", 1).root == Negate(Power(Variable("x", 1), 2))

    def test_precedence(self):
        """Test that products bind tighter than sums"""
        assert parse_operator("t + 1/2*d1", 1).root == BinaryOp(
            "+", Parameter(), BinaryOp("*", Literal(Fraction(1, 2)), Variable("d", 1))
        )

    def test_negative_power_of_scalar(self):
        """Test that scalar subexpressions may be inverted"""
        assert parse_operator("(t + 1)^-1", 1).root == Power(BinaryOp("+", Parameter(), Literal(Fraction(1))), -1)

    def test_negative_power_of_variable(self):
        """Test that x^-1 is refused at the caret"""
        with pytest.raises(OperatorSyntaxError) as err:
            parse_operator("x1^-1", 1)

        assert err.value.position == 2

    def test_dangling_operator(self):
        """Test that a missing operand is reported at the end of input"""
        with pytest.raises(OperatorSyntaxError) as err:
            parse_operator("1 +", 1)

        assert err.value.position == 3

    def test_unbalanced_parenthesis(self):
        """Test that a missing closing parenthesis is reported"""
        with pytest.raises(OperatorSyntaxError):
            parse_operator("(1 + t", 1)

    def test_zero_denominator(self):
        """Test that 1/0 is refused"""
        with pytest.raises(OperatorSyntaxError) as err:
            parse_operator("1/0", 1)

        assert err.value.position == 2

    def test_index_out_of_range(self):
        """Test that indices must lie between 1 and the number of variables"""
        with pytest.raises(IndexOutOfRange):
            parse_operator("t^-1*d1 + x2", 1)

        with pytest.raises(IndexOutOfRange):
            parse_operator("x0", 1)

    def test_no_variables(self):
        """Test that the number of variables must be positive"""
        with pytest.raises(IndexOutOfRange):
            parse_operator("1", 0)


class TestEvaluate:
    """Test normal forms of parsed expressions"""

    def test_normal_form(self):
        """Test that d x is rewritten as x d + 1"""
        assert parse_weyl("d1*x1", 1, PRECISION).to_source() == "1 + x1*d1"

    def test_scalar_inverse(self):
        """Test that (1 + t)^-1 expands to the geometric series"""
        expected = parse_weyl("1 - t + t^2 - t^3 + t^4 - t^5 + t^6 - t^7", 1, PRECISION)

        assert parse_weyl("(1 + t)^-1", 1, PRECISION).equals(expected)

    def test_literal_precision(self):
        """Test that literals carry the requested relative precision"""
        p = parse_weyl("t^-1*d1 + x1", 1, 4)

        assert p.absprec == 3
        assert p.precision == 4

    def test_tate(self):
        """Test parsing of functions"""
        assert parse_tate("x1^2 + t", 1, PRECISION).to_source() == "x1^2 + t"

    def test_tate_refuses_operators(self):
        """Test that functions may not involve d"""
        with pytest.raises(OperatorSyntaxError):
            parse_tate("x1*d1", 1, PRECISION)

    @given(weyl_operators(2))
    def test_print_parse(self, p):
        """Test that printed normal forms parse back to the same operator"""
        assert parse_weyl(p.to_source(), 2, PRECISION).equals(p)

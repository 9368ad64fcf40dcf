"""Tests for the scalar, Tate-algebra and Weyl-algebra layers."""

from fractions import Fraction

import pytest
from hypothesis import assume, given
from tests.strategies import scalars, tate_elements, weyl_operators

from tate_derham.algebra.scalars import EXACT, LaurentScalar, PrecisionBound, t_power, valuation
from tate_derham.algebra.tate import TateElement
from tate_derham.algebra.weyl import apply, invert_unit, multiply, operator_norm, symbol, transpose
from tate_derham.errors import InexactZero, NotAUnit
from tate_derham.models.types import ZeroTest


class TestScalars:
    """Test arithmetic in k((t))"""

    def test_cancellation(self):
        """Test that cancelling leading terms keeps the remaining digits"""
        total = (t_power(-1, 8) + LaurentScalar.one(8)) + (-t_power(-1, 8))

        assert total == LaurentScalar.one(8)
        assert total.valuation == 0
        assert total.relprec == 7

    def test_geometric_identity(self):
        """Test (1 - t)(1 + t + ... + t^7) = 1 mod t^8"""
        one_minus_t = LaurentScalar.one(8) - t_power(1, 8)
        series = LaurentScalar.from_series({k: Fraction(1) for k in range(8)}, 8)

        product = one_minus_t * series

        assert product == LaurentScalar.one(8)
        assert product.absprec == 8

    def test_valuation(self):
        """Test valuations of products, units and polar elements"""
        product = t_power(3, 8) * (LaurentScalar.from_fraction(2, 8) + t_power(2, 8))

        assert valuation(product) == 3
        assert valuation(LaurentScalar.one(8)) == 0
        assert valuation(t_power(-2, 8) + LaurentScalar.one(8)) == -2

    def test_valuation_of_inexact_zero(self):
        """Test that an inexact zero reports a flagged bound"""
        zero = t_power(1, 8) - t_power(1, 8)

        assert zero.is_zero
        assert not zero.is_exact_zero
        assert valuation(zero) == PrecisionBound(9)
        assert zero.zero_test() == ZeroTest.INDISTINGUISHABLE

    def test_exact_zero_is_identity(self):
        """Test that the exact zero never degrades precision"""
        a = LaurentScalar.from_fraction(3, 8, shift=2)

        assert (a + LaurentScalar.zero()).absprec == a.absprec
        assert LaurentScalar.zero().zero_test() == ZeroTest.ZERO
        assert LaurentScalar.zero().absprec >= EXACT

    def test_invert(self):
        """Test inversion of t and of 1 - t"""
        assert t_power(1, 8).inverse() == t_power(-1, 8)

        inverse = (LaurentScalar.one(8) - t_power(1, 8)).inverse()

        assert inverse == LaurentScalar.from_series({k: Fraction(1) for k in range(8)}, 8)

    def test_invert_zero(self):
        """Test that inverting a zero known mod t^8 fails"""
        with pytest.raises(InexactZero):
            LaurentScalar.zero(8).inverse()

    def test_to_json(self):
        """Test the serialized form of a scalar"""
        a = LaurentScalar.from_fraction(Fraction(1, 2), 3, shift=-1)

        assert a.to_json() == {"valuation": -1, "coefficients": ["1/2", "0", "0"], "precision": 3}

    @given(scalars(), scalars())
    def test_valuation_additive(self, a, b):
        """Test v(ab) = v(a) + v(b)"""
        assert (a * b).valuation == a.valuation + b.valuation

    @given(scalars(), scalars())
    def test_ultrametric(self, a, b):
        """Test v(a + b) >= min(v(a), v(b))"""
        assert (a + b).valuation >= min(a.valuation, b.valuation)

    @given(scalars())
    def test_inverse_round_trip(self, a):
        """Test a * a^-1 = 1"""
        assert a * a.inverse() == LaurentScalar.one(a.relprec)


class TestTate:
    """Test the Tate algebra"""

    def test_product(self, tate):
        """Test (1 + t x)(1 - t x) = 1 - t^2 x^2"""
        assert (tate("1 + t*x1") * tate("1 - t*x1")).equals(tate("1 - t^2*x1^2"))

    def test_cancellation_to_inexact_zero(self, tate):
        """Test x + (-x) is an inexact zero at full precision"""
        total = tate("x1") + (-tate("x1"))

        assert total.is_zero
        assert total.absprec == 8

    def test_scale_cancellation(self, tate):
        """Test (t^-1 x)(t x) = x^2"""
        assert (tate("t^-1*x1") * tate("t*x1")).equals(tate("x1^2"))

    def test_gauss_norm(self, tate):
        """Test Gauss norms read off the smallest coefficient valuation"""
        assert tate("x1 + t").gauss_norm() == 0
        assert tate("t^-2*x1^3 + t*x1").gauss_norm() == -2
        assert tate("t^5").gauss_norm() == 5

    def test_gauss_norm_of_zero(self):
        """Test the Gauss norm of an inexact zero is a flagged bound"""
        assert TateElement.zero(1, 6).gauss_norm() == PrecisionBound(6)

    def test_derivative(self, tate):
        """Test partial derivatives"""
        assert tate("x1^3").derivative(1).equals(tate("3*x1^2"))
        assert tate("t^-1*x1").derivative(1).equals(tate("t^-1"))
        assert tate("1").derivative(1).is_zero

    def test_derivative_in_two_variables(self, tate):
        """Test that derivatives act on one variable only"""
        f = tate("x1^2*x2 + x2^3", 2)

        assert f.derivative(1).equals(tate("2*x1*x2", 2))
        assert f.derivative(2).equals(tate("x1^2 + 3*x2^2", 2))

    def test_integrate(self, tate):
        """Test antiderivatives and that they preserve the norm"""
        assert tate("x1^2").integrate(1).equals(tate("1/3*x1^3"))
        assert tate("1").integrate(1).equals(tate("x1"))
        assert tate("t^-1*x1^4").integrate(1).gauss_norm() == -1

    def test_invert_unit(self, tate):
        """Test inversion of units by the geometric series"""
        expected = tate(" + ".join(["1"] + [f"t^{k}*x1^{k}" for k in range(1, 8)]))

        assert tate("1 - t*x1").invert_unit().equals(expected)
        assert tate("t").invert_unit().equals(tate("t^-1"))

    def test_invert_non_unit(self, tate):
        """Test that x is not a unit"""
        with pytest.raises(NotAUnit):
            tate("x1").invert_unit()

    def test_reduce_mod_t(self, tate):
        """Test reduction of an integral element"""
        assert tate("-x1 + t*x1^2").reduce_mod_t() == {(1,): Fraction(-1)}

    def test_to_source(self, tate):
        """Test that printing uses the operator grammar"""
        assert tate("2*t^-1*x1 + 1/3").to_source() == "2*t^-1*x1 + 1/3"

    @given(tate_elements(2), tate_elements(2))
    def test_leibniz(self, f, g):
        """Test d(fg) = d(f) g + f d(g)"""
        assert (f * g).derivative(1).equals(f.derivative(1) * g + f * g.derivative(1))

    @given(tate_elements(2))
    def test_derivative_of_integral(self, f):
        """Test d_i (integral_i f) = f"""
        assert f.integrate(2).derivative(2).equals(f)

    @given(tate_elements(2), tate_elements(2))
    def test_gauss_norm_multiplicative(self, f, g):
        """Test |fg| = |f||g|"""
        assert (f * g).gauss_norm() == f.scale + g.scale

    @given(tate_elements(1), tate_elements(1))
    def test_gauss_norm_ultrametric(self, f, g):
        """Test |f + g| <= max(|f|, |g|)"""
        total = f + g
        assert total.is_zero or total.scale >= min(f.scale, g.scale)

    @given(tate_elements(2), tate_elements(2))
    def test_gauss_norm_strict_ultrametric(self, f, g):
        """Test |f + g| = max(|f|, |g|) when |f| != |g|"""
        assume(f.scale != g.scale)
        total = f + g

        assert not total.is_zero
        assert total.scale == min(f.scale, g.scale)


class TestWeyl:
    """Test the Weyl algebra and its completion"""

    def test_commutation(self, weyl):
        """Test d x = x d + 1"""
        p = multiply(weyl("d1"), weyl("x1"))

        assert p.equals(weyl("x1*d1 + 1"))
        assert p.to_source() == "1 + x1*d1"

    def test_leibniz_expansion(self, weyl):
        """Test d^2 x = x d^2 + 2 d"""
        assert multiply(weyl("d1^2"), weyl("x1")).equals(weyl("x1*d1^2 + 2*d1"))

    def test_geometric_inverse(self, weyl):
        """Test (1 - t d)(sum t^k d^k) = 1 mod t^8"""
        series = weyl(" + ".join(["1"] + [f"t^{k}*d1^{k}" for k in range(1, 8)]))

        assert multiply(weyl("1 - t*d1"), series).equals(weyl("1"))

    def test_apply(self, weyl, tate):
        """Test the natural action on functions"""
        assert apply(weyl("x1*d1"), tate("x1^2")).equals(tate("2*x1^2"))
        assert apply(weyl("d1 - t^-1"), tate("1")).equals(tate("-t^-1"))

    def test_apply_inverse(self, weyl, tate):
        """Test that the truncated inverse of 1 - t d fixes 1"""
        assert apply(invert_unit(weyl("1 - t*d1")), tate("1")).equals(tate("1"))

    def test_transpose(self, weyl):
        """Test the involution on basic operators"""
        assert transpose(weyl("x1*d1")).equals(weyl("-x1*d1 - 1"))
        assert transpose(weyl("x1^2 + t")).equals(weyl("x1^2 + t"))
        assert transpose(weyl("d1^2")).equals(weyl("d1^2"))

    def test_operator_norm(self, weyl):
        """Test operator norms"""
        assert operator_norm(weyl("t^-1*d1 + x1")) == -1
        assert operator_norm(weyl("1 - t*d1")) == 0
        assert operator_norm(weyl("t*x1*d1^2")) == 1

    def test_symbol(self, weyl):
        """Test principal symbols"""
        assert symbol(weyl("x1*d1^2 + d1 + x1")).to_source() == "x1*xi1^2"
        assert symbol(weyl("1 - t*d1")).to_source() == "-t*xi1"
        assert set(symbol(weyl("d1 + d2", 2)).terms) == {(1, 0), (0, 1)}

    def test_symbol_of_zero(self, weyl):
        """Test that the symbol of a vanishing operator is refused"""
        with pytest.raises(InexactZero):
            symbol(weyl("x1") - weyl("x1"))

    def test_invert_unit(self, weyl):
        """Test inversion of 1 - t d at precision 4"""
        inverse = invert_unit(weyl("1 - t*d1", precision=4))

        assert inverse.to_source() == "1 + t*d1 + t^2*d1^2 + t^3*d1^3"

    def test_invert_scalar(self, weyl):
        """Test inversion of a scalar"""
        assert invert_unit(weyl("t")).equals(weyl("t^-1"))

    def test_invert_non_unit(self, weyl):
        """Test that d is not a unit"""
        with pytest.raises(NotAUnit):
            invert_unit(weyl("d1"))

    @given(weyl_operators(2))
    def test_transpose_involution(self, p):
        """Test (P^t)^t = P"""
        assert transpose(transpose(p)).equals(p)

    @given(weyl_operators(1), weyl_operators(1))
    def test_transpose_anti_homomorphism(self, p, q):
        """Test (PQ)^t = Q^t P^t"""
        assert transpose(multiply(p, q)).equals(multiply(transpose(q), transpose(p)))

    @given(weyl_operators(1), weyl_operators(1), tate_elements(1))
    def test_apply_composition(self, p, q, f):
        """Test (PQ)(f) = P(Q(f))"""
        assert apply(multiply(p, q), f).equals(apply(p, apply(q, f)))

    @given(weyl_operators(2), weyl_operators(2))
    def test_operator_norm_multiplicative(self, p, q):
        """Test |PQ| = |P||Q|"""
        assert multiply(p, q).operator_norm() == p.norm + q.norm

    @given(weyl_operators(2), weyl_operators(2))
    def test_symbol_multiplicative(self, p, q):
        """Test sigma(PQ) = sigma(P) sigma(Q)"""
        assert symbol(multiply(p, q)).equals(symbol(p) * symbol(q))

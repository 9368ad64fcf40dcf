"""The Tate algebra K<x_1, ..., x_n> at finite t-adic precision.

An element is stored as a finite map from x-monomials to Laurent polynomials in t, together
with the absolute precision ``absprec``: every coefficient is known modulo ``t^absprec``.
Because the coefficients of a convergent series tend to zero, an element known modulo a power
of t is a genuine polynomial in x, so no x-degree cap is ever imposed here.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from tate_derham.algebra.scalars import (
    EXACT,
    LaurentScalar,
    PrecisionBound,
    Series,
    format_series,
    series_add,
    series_mul,
    series_scale,
    series_valuation,
    truncate,
)
from tate_derham.errors import NotAUnit

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]


def degrevlex_key(mono: Monomial) -> tuple:
    """Sort key realizing degrevlex: larger keys are larger monomials."""
    return (sum(mono), tuple(-e for e in reversed(mono)))


def unit_vector(i: int, n: int) -> Monomial:
    """The exponent vector of the i-th variable (1-based)."""
    return tuple(1 if j == i - 1 else 0 for j in range(n))


def format_monomial(mono: Monomial, prefix: str) -> str:
    """Render ``x1^2*x3`` style monomials; empty for the unit monomial."""
    parts = []
    for i, e in enumerate(mono, start=1):
        if e == 1:
            parts.append(f"{prefix}{i}")
        elif e > 1:
            parts.append(f"{prefix}{i}^{e}")
    return "*".join(parts)


def format_terms(terms: list[tuple[Series, str]]) -> str:
    """Render a sum of ``coefficient * monomial`` terms in the operator grammar."""
    out = ""
    for series, mono in terms:
        if len(series) == 1:
            ((e, c),) = series.items()
            negative = c < 0
            factors = []
            if abs(c) != 1 or (e == 0 and not mono):
                factors.append(str(abs(c)))
            if e:
                factors.append("t" if e == 1 else f"t^{e}")
            if mono:
                factors.append(mono)
            body = "*".join(factors)
        else:
            negative = False
            body = f"({format_series(series)})" + (f"*{mono}" if mono else "")
        if not out:
            out = f"-{body}" if negative else body
        else:
            out += f" - {body}" if negative else f" + {body}"
    return out or "0"


@dataclass(frozen=True, slots=True, eq=False)
class TateElement:
    """An element of K<x_1, ..., x_n> known modulo ``t^absprec``.

    Args:
        var_count: The number of variables.
        terms: Map from x-monomials to the Laurent polynomial coefficient in t.
        absprec: The absolute t-adic precision shared by all coefficients.
    """

    var_count: int
    terms: Mapping[Monomial, Series]
    absprec: int

    @classmethod
    def build(cls, var_count: int, terms: Mapping[Monomial, Mapping[int, Fraction]], absprec: int) -> "TateElement":
        """Normalize ``terms`` at ``absprec`` and build the element."""
        clean = {}
        for mono, series in terms.items():
            kept = truncate(series, absprec)
            if kept:
                clean[tuple(mono)] = kept
        return cls(var_count, clean, absprec)

    @classmethod
    def constant(cls, value: LaurentScalar, var_count: int) -> "TateElement":
        return cls.build(var_count, {(0,) * var_count: value.series()}, value.absprec)

    @classmethod
    def zero(cls, var_count: int, absprec: int = EXACT) -> "TateElement":
        return cls(var_count, {}, absprec)

    @classmethod
    def one(cls, var_count: int, precision: int) -> "TateElement":
        return cls.constant(LaurentScalar.one(precision), var_count)

    @classmethod
    def variable(cls, i: int, var_count: int, precision: int) -> "TateElement":
        """The coordinate ``x_i`` with relative precision ``precision``."""
        return cls(var_count, {unit_vector(i, var_count): {0: Fraction(1)}}, precision)

    @classmethod
    def monomial(cls, mono: Monomial, coefficient: LaurentScalar) -> "TateElement":
        return cls.build(len(mono), {tuple(mono): coefficient.series()}, coefficient.absprec)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def scale(self) -> int:
        """The t-exponent extracted so the rest is a unit-norm element of o_K<x>."""
        if not self.terms:
            return self.absprec
        return min(series_valuation(s) for s in self.terms.values())

    @property
    def precision(self) -> int:
        """The relative precision ``absprec - scale``."""
        return self.absprec - self.scale

    @property
    def body(self) -> dict[Monomial, Series]:
        """The terms divided by ``t^scale``."""
        s = self.scale
        return {mono: series_scale(series, Fraction(1), -s) for mono, series in self.terms.items()}

    def gauss_norm(self) -> Union[int, PrecisionBound]:
        """The log Gauss norm ``v`` with ``|f| = |t|^v``; a flagged bound for inexact zeros."""
        if not self.terms:
            return PrecisionBound(self.absprec)
        return self.scale

    def degree(self) -> int:
        """The total x-degree, -1 for zero."""
        return max((sum(mono) for mono in self.terms), default=-1)

    def coefficient(self, mono: Monomial) -> LaurentScalar:
        """The coefficient of ``x^mono`` as a scalar known modulo ``t^absprec``."""
        if self.absprec >= EXACT:
            return LaurentScalar.zero()
        return LaurentScalar.from_series(self.terms.get(tuple(mono), {}), self.absprec)

    def with_absprec(self, absprec: int) -> "TateElement":
        if absprec >= self.absprec:
            return self
        return TateElement.build(self.var_count, self.terms, absprec)

    def _check(self, other: "TateElement"):
        if self.var_count != other.var_count:
            raise ValueError(f"variable counts differ: {self.var_count} != {other.var_count}")

    def __add__(self, other: "TateElement") -> "TateElement":
        self._check(other)
        absprec = min(self.absprec, other.absprec)
        terms = {mono: dict(series) for mono, series in self.terms.items()}
        for mono, series in other.terms.items():
            terms[mono] = series_add(terms.get(mono, {}), series)
        return TateElement.build(self.var_count, terms, absprec)

    def __neg__(self) -> "TateElement":
        return TateElement(
            self.var_count, {m: series_scale(s, Fraction(-1)) for m, s in self.terms.items()}, self.absprec
        )

    def __sub__(self, other: "TateElement") -> "TateElement":
        return self + (-other)

    def __mul__(self, other: "TateElement") -> "TateElement":
        self._check(other)
        if self.absprec >= EXACT and not self.terms or other.absprec >= EXACT and not other.terms:
            return TateElement.zero(self.var_count)
        absprec = min(self.absprec + other.scale, other.absprec + self.scale)
        terms: dict[Monomial, Series] = {}
        for ma, sa in self.terms.items():
            for mb, sb in other.terms.items():
                mono = tuple(a + b for a, b in zip(ma, mb))
                terms[mono] = series_add(terms.get(mono, {}), series_mul(sa, sb, absprec))
        return TateElement.build(self.var_count, terms, absprec)

    def scalar_mul(self, c: LaurentScalar) -> "TateElement":
        return self * TateElement.constant(c, self.var_count)

    def scale_by(self, c: Fraction) -> "TateElement":
        """Multiply by a nonzero rational, a unit of o_K."""
        terms = {m: series_scale(s, Fraction(c)) for m, s in self.terms.items()}
        return TateElement(self.var_count, terms, self.absprec)

    def __pow__(self, k: int) -> "TateElement":
        result = TateElement.one(self.var_count, max(self.precision, 1))
        for _ in range(k):
            result = result * self
        return result

    def derivative(self, i: int) -> "TateElement":
        """The partial derivative in ``x_i`` (1-based)."""
        self._index(i)
        terms = {}
        for mono, series in self.terms.items():
            e = mono[i - 1]
            if e:
                lowered = mono[: i - 1] + (e - 1,) + mono[i:]
                terms[lowered] = series_scale(series, Fraction(e))
        return TateElement.build(self.var_count, terms, self.absprec)

    def integrate(self, i: int) -> "TateElement":
        """The antiderivative in ``x_i`` with no term constant along ``x_i``."""
        self._index(i)
        terms = {}
        for mono, series in self.terms.items():
            e = mono[i - 1]
            raised = mono[: i - 1] + (e + 1,) + mono[i:]
            terms[raised] = series_scale(series, Fraction(1, e + 1))
        return TateElement.build(self.var_count, terms, self.absprec)

    def _index(self, i: int):
        if not 1 <= i <= self.var_count:
            raise IndexError(f"variable index {i} outside 1..{self.var_count}")

    def invert_unit(self) -> "TateElement":
        """Invert ``c * (1 + h)`` with ``c`` a scalar and ``|h| < 1`` by the geometric series.

        Raises:
            NotAUnit: If the reduction modulo t of the normalized element is not a nonzero constant.
        """
        if not self.terms:
            raise NotAUnit("zero is not a unit")
        s = self.scale
        origin = (0,) * self.var_count
        for mono, series in self.terms.items():
            if mono != origin and series_valuation(series) == s:
                raise NotAUnit(f"{self} is not a scalar plus a contraction")
        c = self.coefficient(origin)
        if c.is_zero or c.valuation != s:
            raise NotAUnit(f"{self} is not a scalar plus a contraction")
        c_inv = TateElement.constant(c.inverse(), self.var_count)
        one = TateElement.one(self.var_count, self.precision)
        h = self * c_inv - one
        step = -h
        power = one
        total = one
        for _ in range(1, self.precision):
            power = power * step
            if power.is_zero:
                break
            total = total + power
        inverse = total * c_inv
        if not (self * inverse).equals(TateElement.one(self.var_count, self.precision)):
            raise NotAUnit(f"geometric series failed to invert {self}")
        return inverse

    def equals(self, other: "TateElement") -> bool:
        """Equality at the smaller of the two precisions."""
        return (self - other).is_zero

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TateElement):
            return NotImplemented
        return self.var_count == other.var_count and self.equals(other)

    __hash__ = None

    def reduce_mod_t(self) -> dict[Monomial, Fraction]:
        """The image in k[x] of an element of o_K<x>.

        Raises:
            ValueError: If the element is not integral.
        """
        if self.terms and self.scale < 0:
            raise ValueError(f"{self} is not integral")
        return {mono: series[0] for mono, series in self.terms.items() if series.get(0)}

    def sorted_monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=degrevlex_key, reverse=True)

    def to_source(self) -> str:
        """The element in the operator grammar."""
        return format_terms([(self.terms[m], format_monomial(m, "x")) for m in self.sorted_monomials()])

    def to_json(self) -> dict:
        return {
            "scale": self.scale if self.terms or self.absprec < EXACT else None,
            "terms": [
                {
                    "exponents": list(mono),
                    "tPoly": [{"exponent": e, "coefficient": str(c)} for e, c in sorted(self.terms[mono].items())],
                }
                for mono in self.sorted_monomials()
            ],
            "precision": self.precision if self.absprec < EXACT else None,
        }

    def __str__(self):
        if self.absprec >= EXACT:
            return self.to_source()
        return f"{self.to_source()} + O(t^{self.absprec})"

    def __repr__(self):
        return f"TateElement({self})"

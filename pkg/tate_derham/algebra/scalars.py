"""Arithmetic in K = Q((t)) with capped relative t-adic precision.

A nonzero scalar is stored as ``t^valuation * (u_0 + u_1 t + ... + u_{r-1} t^{r-1})`` with
``u_0 != 0``; ``r`` is the relative precision and the scalar is known modulo
``t^(valuation + r)``.  A scalar whose digits all vanish is an inexact zero: it has an empty
unit part and its ``valuation`` holds the absolute precision to which it is known to vanish.
The exact zero is the inexact zero known to infinite precision.
"""

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from tate_derham.errors import InexactZero
from tate_derham.models.types import ZeroTest

EXACT = sys.maxsize
"""Absolute precision of the exact zero."""

Series = dict[int, Fraction]


@dataclass(frozen=True, slots=True)
class PrecisionBound:
    """Valuation of an inexact zero: the true valuation is at least ``bound``."""

    bound: int

    def __str__(self):
        return f">={self.bound}"


def truncate(series: Mapping[int, Fraction], cap: int) -> Series:
    """Drop the terms of exponent ``cap`` and above, and all vanishing terms."""
    return {e: c for e, c in series.items() if e < cap and c}


def series_add(a: Mapping[int, Fraction], b: Mapping[int, Fraction], cap: int = EXACT) -> Series:
    """Sum of two Laurent polynomials, truncated at ``cap``."""
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return truncate(out, cap)


def series_scale(a: Mapping[int, Fraction], c: Fraction, shift: int = 0) -> Series:
    """``c * t^shift * a``."""
    if not c:
        return {}
    return {e + shift: c * v for e, v in a.items()}


def series_mul(a: Mapping[int, Fraction], b: Mapping[int, Fraction], cap: int = EXACT) -> Series:
    """Product of two Laurent polynomials, truncated at ``cap``."""
    out: Series = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if e < cap:
                out[e] = out.get(e, 0) + ca * cb
    return truncate(out, cap)


def series_valuation(a: Mapping[int, Fraction]) -> int:
    """Smallest exponent with a nonzero coefficient; ``EXACT`` for the empty series."""
    exps = [e for e, c in a.items() if c]
    return min(exps) if exps else EXACT


@dataclass(frozen=True, slots=True, eq=False)
class LaurentScalar:
    """An element of K = Q((t)) known to finite relative precision.

    Args:
        valuation: The t-adic valuation, or the absolute precision for an inexact zero.
        unit: The unit part, most significant digit first.
    """

    valuation: int
    unit: tuple[Fraction, ...] = ()

    @classmethod
    def from_series(cls, series: Mapping[int, Fraction], absprec: int) -> "LaurentScalar":
        """Build the scalar ``sum c_e t^e`` known modulo ``t^absprec``."""
        terms = truncate(series, absprec)
        if not terms:
            return cls.zero(absprec)
        v = min(terms)
        if absprec == EXACT:
            raise ValueError("only zero can be exact")
        return cls(v, tuple(Fraction(terms.get(v + i, 0)) for i in range(absprec - v)))

    @classmethod
    def from_fraction(cls, value: Union[int, Fraction], precision: int, shift: int = 0) -> "LaurentScalar":
        """The scalar ``value * t^shift`` with relative precision ``precision``."""
        value = Fraction(value)
        if not value:
            return cls.zero(shift + precision)
        return cls(shift, (value,) + (Fraction(0),) * (precision - 1))

    @classmethod
    def zero(cls, absprec: int = EXACT) -> "LaurentScalar":
        """The zero known modulo ``t^absprec``; exact by default."""
        return cls(absprec, ())

    @classmethod
    def one(cls, precision: int) -> "LaurentScalar":
        return cls.from_fraction(1, precision)

    @property
    def is_zero(self) -> bool:
        return not self.unit

    @property
    def is_exact_zero(self) -> bool:
        return not self.unit and self.valuation >= EXACT

    @property
    def relprec(self) -> int:
        return len(self.unit)

    @property
    def absprec(self) -> int:
        return self.valuation + len(self.unit)

    def series(self) -> Series:
        """The known digits as a map from exponent to coefficient."""
        return {self.valuation + i: c for i, c in enumerate(self.unit) if c}

    def coefficient(self, exponent: int) -> Fraction:
        """The coefficient of ``t^exponent``."""
        i = exponent - self.valuation
        if 0 <= i < len(self.unit):
            return self.unit[i]
        return Fraction(0)

    def zero_test(self) -> ZeroTest:
        if self.unit:
            return ZeroTest.NONZERO
        if self.is_exact_zero:
            return ZeroTest.ZERO
        return ZeroTest.INDISTINGUISHABLE

    def __add__(self, other: "LaurentScalar") -> "LaurentScalar":
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        absprec = min(self.absprec, other.absprec)
        return LaurentScalar.from_series(series_add(self.series(), other.series(), absprec), absprec)

    def __neg__(self) -> "LaurentScalar":
        return LaurentScalar(self.valuation, tuple(-c for c in self.unit))

    def __sub__(self, other: "LaurentScalar") -> "LaurentScalar":
        return self + (-other)

    def __mul__(self, other: "LaurentScalar") -> "LaurentScalar":
        if self.is_exact_zero or other.is_exact_zero:
            return LaurentScalar.zero()
        if self.is_zero or other.is_zero:
            return LaurentScalar.zero(min(self.absprec + other.valuation, other.absprec + self.valuation))
        relprec = min(self.relprec, other.relprec)
        unit = [Fraction(0)] * relprec
        for i in range(relprec):
            a = self.unit[i]
            if a:
                for j in range(relprec - i):
                    unit[i + j] += a * other.unit[j]
        return LaurentScalar(self.valuation + other.valuation, tuple(unit))

    def inverse(self) -> "LaurentScalar":
        """The multiplicative inverse.

        Raises:
            InexactZero: If the scalar is zero at its precision.
        """
        if self.is_zero:
            raise InexactZero(f"cannot invert zero known modulo t^{self.valuation}")
        u0 = self.unit[0]
        inv = [1 / u0]
        for k in range(1, self.relprec):
            acc = sum((self.unit[i] * inv[k - i] for i in range(1, k + 1)), Fraction(0))
            inv.append(-acc / u0)
        return LaurentScalar(-self.valuation, tuple(inv))

    def __truediv__(self, other: "LaurentScalar") -> "LaurentScalar":
        return self * other.inverse()

    def __pow__(self, k: int) -> "LaurentScalar":
        if k < 0:
            return self.inverse() ** (-k)
        result = LaurentScalar.one(self.relprec or 1)
        for _ in range(k):
            result = result * self
        return result

    def shift(self, k: int) -> "LaurentScalar":
        """Multiply by ``t^k``."""
        if self.is_exact_zero:
            return self
        return LaurentScalar(self.valuation + k, self.unit)

    def with_absprec(self, absprec: int) -> "LaurentScalar":
        """Forget the digits at and above ``t^absprec``."""
        if absprec >= self.absprec:
            return self
        return LaurentScalar.from_series(self.series(), absprec)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "valuation": None if self.is_exact_zero else self.valuation,
            "coefficients": [str(c) for c in self.unit],
            "precision": self.relprec,
        }

    def __str__(self):
        if self.is_exact_zero:
            return "0"
        body = format_series(self.series())
        return f"{body} + O(t^{self.absprec})" if self.unit else f"O(t^{self.valuation})"

    def __repr__(self):
        return f"LaurentScalar({self})"


def valuation(a: LaurentScalar) -> Union[int, PrecisionBound]:
    """The valuation of ``a``, or a flagged lower bound when ``a`` is an inexact zero."""
    if a.is_zero:
        return PrecisionBound(a.valuation)
    return a.valuation


def t_power(k: int, precision: int) -> LaurentScalar:
    """The uniformizer power ``t^k``."""
    return LaurentScalar.from_fraction(1, precision, shift=k)


def format_series(series: Mapping[int, Fraction]) -> str:
    """Render a Laurent polynomial in the operator grammar, e.g. ``2*t^-1 - 1/3 + t``."""
    out = ""
    for e in sorted(series):
        c = series[e]
        if not c:
            continue
        mag = abs(c)
        if e == 0:
            term = str(mag)
        else:
            power = "t" if e == 1 else f"t^{e}"
            term = power if mag == 1 else f"{mag}*{power}"
        if not out:
            out = term if c > 0 else f"-{term}"
        else:
            out += f" + {term}" if c > 0 else f" - {term}"
    return out or "0"

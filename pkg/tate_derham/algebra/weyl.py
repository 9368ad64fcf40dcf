"""Differential operators ``sum f_alpha d^alpha`` with Tate-algebra coefficients.

One representation serves both the Weyl algebra and truncations of its completion: modulo a
power of t an element of the completion has finite d-order.  Coefficients are kept on the
left of the d-monomials and share the operator's absolute precision.
"""

import logging
from dataclasses import dataclass
from math import comb
from typing import Iterator, Mapping, Union

from tate_derham.algebra.scalars import EXACT, LaurentScalar, PrecisionBound, Series
from tate_derham.algebra.tate import (
    Monomial,
    TateElement,
    degrevlex_key,
    format_monomial,
    format_terms,
    unit_vector,
)
from tate_derham.errors import InexactZero, NotAUnit

logger = logging.getLogger(__name__)

DIndex = tuple[int, ...]


def sub_indices(alpha: DIndex) -> Iterator[DIndex]:
    """All multi-indices ``beta <= alpha`` componentwise."""
    if not alpha:
        yield ()
        return
    for head in range(alpha[0] + 1):
        for tail in sub_indices(alpha[1:]):
            yield (head,) + tail


def multi_binomial(alpha: DIndex, beta: DIndex) -> int:
    out = 1
    for a, b in zip(alpha, beta):
        out *= comb(a, b)
    return out


def partial(f: TateElement, beta: DIndex) -> TateElement:
    """``d^beta f``."""
    for i, k in enumerate(beta, start=1):
        for _ in range(k):
            f = f.derivative(i)
    return f


def _norm(terms: Mapping[DIndex, TateElement], absprec: int) -> int:
    return min((c.scale for c in terms.values()), default=absprec)


@dataclass(frozen=True, slots=True, eq=False)
class WeylOperator:
    """An operator ``sum f_alpha d^alpha`` known modulo ``t^absprec``.

    Args:
        var_count: The number of variables.
        terms: Map from d-multi-indices to their left coefficients.
        absprec: The absolute t-adic precision shared by all coefficients.
    """

    var_count: int
    terms: Mapping[DIndex, TateElement]
    absprec: int

    @classmethod
    def build(cls, var_count: int, terms: Mapping[DIndex, TateElement], absprec: int) -> "WeylOperator":
        clean = {}
        for alpha, coefficient in terms.items():
            coefficient = coefficient.with_absprec(absprec)
            if not coefficient.is_zero:
                clean[tuple(alpha)] = coefficient
        return cls(var_count, clean, absprec)

    @classmethod
    def from_tate(cls, f: TateElement) -> "WeylOperator":
        return cls.build(f.var_count, {(0,) * f.var_count: f}, f.absprec)

    @classmethod
    def scalar(cls, c: LaurentScalar, var_count: int) -> "WeylOperator":
        return cls.from_tate(TateElement.constant(c, var_count))

    @classmethod
    def zero(cls, var_count: int, absprec: int = EXACT) -> "WeylOperator":
        return cls(var_count, {}, absprec)

    @classmethod
    def one(cls, var_count: int, precision: int) -> "WeylOperator":
        return cls.scalar(LaurentScalar.one(precision), var_count)

    @classmethod
    def x(cls, i: int, var_count: int, precision: int) -> "WeylOperator":
        return cls.from_tate(TateElement.variable(i, var_count, precision))

    @classmethod
    def d(cls, i: int, var_count: int, precision: int) -> "WeylOperator":
        return cls.d_monomial(unit_vector(i, var_count), precision)

    @classmethod
    def d_monomial(cls, alpha: DIndex, precision: int) -> "WeylOperator":
        n = len(alpha)
        return cls(n, {tuple(alpha): TateElement.one(n, precision)}, precision)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def norm(self) -> int:
        """The log operator norm; the absolute precision for a zero operator."""
        return _norm(self.terms, self.absprec)

    @property
    def precision(self) -> int:
        return self.absprec - self.norm

    @property
    def order(self) -> int:
        """The d-order, -1 for zero."""
        return max((sum(alpha) for alpha in self.terms), default=-1)

    def coefficient(self, alpha: DIndex) -> TateElement:
        return self.terms.get(tuple(alpha), TateElement.zero(self.var_count, self.absprec))

    def is_scalar(self) -> bool:
        """Whether the operator is an element of K."""
        origin = (0,) * self.var_count
        return all(alpha == origin and set(f.terms) <= {origin} for alpha, f in self.terms.items())

    def scalar_value(self) -> LaurentScalar:
        origin = (0,) * self.var_count
        return self.coefficient(origin).coefficient(origin)

    def operator_norm(self) -> Union[int, PrecisionBound]:
        """``min gauss_norm(f_alpha)``; a flagged bound for zero operators."""
        if not self.terms:
            return PrecisionBound(self.absprec)
        return self.norm

    def _check(self, other: "WeylOperator"):
        if self.var_count != other.var_count:
            raise ValueError(f"variable counts differ: {self.var_count} != {other.var_count}")

    def __add__(self, other: "WeylOperator") -> "WeylOperator":
        self._check(other)
        terms = dict(self.terms)
        for alpha, g in other.terms.items():
            terms[alpha] = terms[alpha] + g if alpha in terms else g
        return WeylOperator.build(self.var_count, terms, min(self.absprec, other.absprec))

    def __neg__(self) -> "WeylOperator":
        return WeylOperator(self.var_count, {a: -f for a, f in self.terms.items()}, self.absprec)

    def __sub__(self, other: "WeylOperator") -> "WeylOperator":
        return self + (-other)

    def __mul__(self, other: "WeylOperator") -> "WeylOperator":
        return multiply(self, other)

    def __pow__(self, k: int) -> "WeylOperator":
        result = WeylOperator.one(self.var_count, max(self.precision, 1))
        for _ in range(k):
            result = multiply(result, self)
        return result

    def equals(self, other: "WeylOperator") -> bool:
        """Equality at the smaller of the two precisions."""
        return (self - other).is_zero

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeylOperator):
            return NotImplemented
        return self.var_count == other.var_count and self.equals(other)

    __hash__ = None

    def sorted_indices(self) -> list[DIndex]:
        return sorted(self.terms, key=degrevlex_key)

    def to_source(self) -> str:
        """The operator in the operator grammar, d-order ascending."""
        pieces: list[tuple[Series, str]] = []
        for alpha in self.sorted_indices():
            d_part = format_monomial(alpha, "d")
            f = self.terms[alpha]
            for mono in f.sorted_monomials():
                x_part = format_monomial(mono, "x")
                pieces.append((f.terms[mono], "*".join(p for p in (x_part, d_part) if p)))
        return format_terms(pieces)

    def to_json(self) -> dict:
        return {
            "varCount": self.var_count,
            "terms": [
                {"dExponents": list(alpha), "coefficient": self.terms[alpha].to_json()}
                for alpha in self.sorted_indices()
            ],
            "precision": self.precision if self.absprec < EXACT else None,
        }

    def __str__(self):
        if self.absprec >= EXACT:
            return self.to_source()
        return f"{self.to_source()} + O(t^{self.absprec})"

    def __repr__(self):
        return f"WeylOperator({self})"


def multiply(p: WeylOperator, q: WeylOperator) -> WeylOperator:
    """The normal form of ``p * q``, via ``d^alpha g = sum binom(alpha, beta) d^beta(g) d^(alpha - beta)``."""
    p._check(q)
    if p.absprec >= EXACT and p.is_zero or q.absprec >= EXACT and q.is_zero:
        return WeylOperator.zero(p.var_count)
    absprec = min(p.absprec + q.norm, q.absprec + p.norm)
    derivatives: dict[tuple[DIndex, DIndex], TateElement] = {}
    terms: dict[DIndex, TateElement] = {}
    for alpha, f in p.terms.items():
        for gamma, g in q.terms.items():
            for beta in sub_indices(alpha):
                key = (gamma, beta)
                if key not in derivatives:
                    derivatives[key] = partial(g, beta)
                dg = derivatives[key]
                if dg.is_zero:
                    continue
                weight = multi_binomial(alpha, beta)
                coefficient = (f * dg).scale_by(weight)
                target = tuple(a - b + c for a, b, c in zip(alpha, beta, gamma))
                terms[target] = terms[target] + coefficient if target in terms else coefficient
    return WeylOperator.build(p.var_count, terms, absprec)


def apply(p: WeylOperator, f: TateElement) -> TateElement:
    """The natural action of ``p`` on ``f``."""
    result = TateElement.zero(f.var_count)
    for alpha, coefficient in p.terms.items():
        result = result + coefficient * partial(f, alpha)
    if p.absprec < EXACT:
        result = result.with_absprec(p.absprec + f.scale)
    return result


def transpose(p: WeylOperator) -> WeylOperator:
    """The involution ``sum f_alpha d^alpha -> sum (-1)^|alpha| d^alpha f_alpha`` in normal form."""
    terms: dict[DIndex, TateElement] = {}
    for alpha, f in p.terms.items():
        sign = -1 if sum(alpha) % 2 else 1
        for beta in sub_indices(alpha):
            df = partial(f, beta)
            if df.is_zero:
                continue
            weight = sign * multi_binomial(alpha, beta)
            coefficient = df.scale_by(weight)
            target = tuple(a - b for a, b in zip(alpha, beta))
            terms[target] = terms[target] + coefficient if target in terms else coefficient
    return WeylOperator.build(p.var_count, terms, p.absprec)


def operator_norm(p: WeylOperator) -> Union[int, PrecisionBound]:
    return p.operator_norm()


@dataclass(frozen=True, slots=True, eq=False)
class Symbol:
    """A commutative polynomial ``sum f_alpha xi^alpha`` with Tate coefficients."""

    var_count: int
    terms: Mapping[DIndex, TateElement]

    def __mul__(self, other: "Symbol") -> "Symbol":
        terms: dict[DIndex, TateElement] = {}
        for alpha, f in self.terms.items():
            for gamma, g in other.terms.items():
                target = tuple(a + c for a, c in zip(alpha, gamma))
                product = f * g
                terms[target] = terms[target] + product if target in terms else product
        return Symbol(self.var_count, {a: f for a, f in terms.items() if not f.is_zero})

    def equals(self, other: "Symbol") -> bool:
        for alpha in set(self.terms) | set(other.terms):
            zero = TateElement.zero(self.var_count)
            if not self.terms.get(alpha, zero).equals(other.terms.get(alpha, zero)):
                return False
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Symbol):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def to_source(self) -> str:
        pieces: list[tuple[Series, str]] = []
        for alpha in sorted(self.terms, key=degrevlex_key):
            xi_part = format_monomial(alpha, "xi")
            f = self.terms[alpha]
            for mono in f.sorted_monomials():
                x_part = format_monomial(mono, "x")
                pieces.append((f.terms[mono], "*".join(p for p in (x_part, xi_part) if p)))
        return format_terms(pieces)

    def __str__(self):
        return self.to_source()


def symbol(p: WeylOperator) -> Symbol:
    """The principal symbol: the top-order part with ``d_i`` replaced by ``xi_i``.

    Raises:
        InexactZero: If ``p`` is zero at its precision.
    """
    if p.is_zero:
        raise InexactZero(f"operator vanishes modulo t^{p.absprec}")
    m = p.order
    return Symbol(p.var_count, {alpha: f for alpha, f in p.terms.items() if sum(alpha) == m})


def invert_unit(p: WeylOperator) -> WeylOperator:
    """Invert ``c * (1 - Q)`` with ``c`` a scalar and ``|Q| < 1`` by the truncated geometric series.

    The result is checked by multiplying back.

    Raises:
        NotAUnit: If ``p`` is not a scalar plus a contraction at its precision.
    """
    if p.is_zero:
        raise NotAUnit("zero is not a unit")
    n = p.var_count
    s = p.norm
    origin: Monomial = (0,) * n
    for alpha, f in p.terms.items():
        for mono, series in f.terms.items():
            if (alpha, mono) != (origin, origin) and min(series) == s:
                raise NotAUnit(f"{p.to_source()} is not a scalar plus a contraction")
    c = p.scalar_value()
    if c.is_zero or c.valuation != s:
        raise NotAUnit(f"{p.to_source()} is not a scalar plus a contraction")
    precision = p.precision
    c_inv = WeylOperator.scalar(c.inverse(), n)
    one = WeylOperator.one(n, precision)
    q = one - multiply(c_inv, p)
    power = one
    total = one
    for _ in range(1, precision):
        power = multiply(power, q)
        if power.is_zero:
            break
        total = total + power
    inverse = multiply(total, c_inv)
    if not multiply(p, inverse).equals(WeylOperator.one(n, precision)):
        raise NotAUnit(f"geometric series failed to invert {p.to_source()}")
    logger.debug("inverted %s with %d terms", p.to_source(), len(inverse.terms))
    return inverse

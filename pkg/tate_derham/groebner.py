"""Left Groebner bases in the Weyl algebra over Q(t) and characteristic varieties.

Operators are converted to an exact representation: a map from ``(a, b)`` (the exponents of
``x^a d^b``) to an element of the rational function field Q(t).  The term order compares the
d-degree first and breaks ties by degrevlex on the combined exponent vector, so initial forms
are order-filtration symbols.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, perm
from typing import Any, Mapping, Optional, Sequence

import sympy
from sympy import QQ, Poly, groebner

from tate_derham.algebra.tate import Monomial, degrevlex_key, format_monomial
from tate_derham.algebra.weyl import DIndex, WeylOperator, symbol
from tate_derham.errors import UnsupportedCoefficients
from tate_derham.models import CharVarietyReport

logger = logging.getLogger(__name__)

T = sympy.Symbol("t")
FIELD = QQ.frac_field(T)

Key = tuple[Monomial, DIndex]


def x_symbols(n: int) -> list[sympy.Symbol]:
    return list(sympy.symbols(f"x1:{n + 1}"))


def xi_symbols(n: int) -> list[sympy.Symbol]:
    return list(sympy.symbols(f"xi1:{n + 1}"))


def symbol_ring(n: int) -> list[sympy.Symbol]:
    """The generators ``x_1..x_n, xi_1..xi_n`` of the symbol ring."""
    return x_symbols(n) + xi_symbols(n)


def term_key(key: Key) -> tuple:
    """Sort key of the term order; larger keys are larger terms."""
    a, b = key
    return (sum(b),) + degrevlex_key(a + b)


def field_element(series: Mapping[int, Any]) -> Any:
    expr = sympy.Integer(0)
    for e, c in series.items():
        expr += sympy.Rational(c.numerator, c.denominator) * T**e
    return FIELD.from_sympy(expr)


def _divides(lead: Key, key: Key) -> bool:
    return all(u <= v for u, v in zip(lead[0] + lead[1], key[0] + key[1]))


def _monomial_product(left: Key, right: Key) -> dict[Key, int]:
    """``x^a d^b * x^c d^e`` in normal form, via ``d^b x^c = sum_k binom(b,k) c!/(c-k)! x^(c-k) d^(b-k)``."""
    (a, b), (c, e) = left, right
    weights: list[list[tuple[int, int]]] = []
    for bi, ci in zip(b, c):
        weights.append([(k, comb(bi, k) * perm(ci, k)) for k in range(min(bi, ci) + 1)])
    out: dict[Key, int] = {}

    def expand(i: int, ks: tuple[int, ...], weight: int):
        if i == len(b):
            key = (
                tuple(ai + ci - k for ai, ci, k in zip(a, c, ks)),
                tuple(bi - k + ei for bi, ei, k in zip(b, e, ks)),
            )
            out[key] = out.get(key, 0) + weight
            return
        for k, w in weights[i]:
            expand(i + 1, ks + (k,), weight * w)

    expand(0, (), 1)
    return out


@dataclass(frozen=True)
class ExactOperator:
    """A Weyl-algebra element with polynomial x-coefficients over Q(t)."""

    var_count: int
    terms: Mapping[Key, Any] = field(default_factory=dict)

    @classmethod
    def from_weyl(cls, p: WeylOperator) -> "ExactOperator":
        """Read the finite data of ``p`` as an exact operator.

        Raises:
            UnsupportedCoefficients: If ``p`` vanishes at its precision.
        """
        if p.is_zero:
            raise UnsupportedCoefficients(f"relation vanishes modulo t^{p.absprec}")
        terms = {}
        for alpha, f in p.terms.items():
            for mono, series in f.terms.items():
                terms[(mono, alpha)] = field_element(series)
        return cls(p.var_count, terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading_key(self) -> Key:
        return max(self.terms, key=term_key)

    @property
    def leading_coefficient(self) -> Any:
        return self.terms[self.leading_key]

    def monic(self) -> "ExactOperator":
        lc = self.leading_coefficient
        return ExactOperator(self.var_count, {k: c / lc for k, c in self.terms.items()})

    def __sub__(self, other: "ExactOperator") -> "ExactOperator":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            value = terms.get(k, FIELD.zero) - c
            if value:
                terms[k] = value
            else:
                terms.pop(k, None)
        return ExactOperator(self.var_count, terms)

    def left_multiply(self, key: Key, coefficient: Any) -> "ExactOperator":
        """``coefficient * x^a d^b * self``."""
        terms: dict[Key, Any] = {}
        for own, c in self.terms.items():
            for target, w in _monomial_product(key, own).items():
                terms[target] = terms.get(target, FIELD.zero) + coefficient * c * w
        return ExactOperator(self.var_count, {k: c for k, c in terms.items() if c})

    def initial_form(self) -> Poly:
        """The top d-degree part with ``d_i`` replaced by ``xi_i``, as a monic polynomial."""
        top = max(sum(b) for _, b in self.terms)
        rep = {a + b: c for (a, b), c in self.terms.items() if sum(b) == top}
        return Poly.from_dict(rep, *symbol_ring(self.var_count), domain=FIELD).monic()

    def sorted_keys(self) -> list[Key]:
        return sorted(self.terms, key=term_key, reverse=True)

    def to_source(self) -> str:
        pieces = []
        for key in self.sorted_keys():
            a, b = key
            mono = "*".join(p for p in (format_monomial(a, "x"), format_monomial(b, "d")) if p)
            coefficient = FIELD.to_sympy(self.terms[key])
            if mono:
                pieces.append(f"({coefficient})*{mono}" if coefficient != 1 else mono)
            else:
                pieces.append(f"({coefficient})")
        return " + ".join(pieces) or "0"

    def __str__(self):
        return self.to_source()


def normal_form(f: ExactOperator, basis: Sequence[ExactOperator]) -> ExactOperator:
    """The full normal form of ``f`` modulo the left ideal generated by ``basis``."""
    remainder: dict[Key, Any] = {}
    current = f
    while not current.is_zero:
        lead = current.leading_key
        c = current.terms[lead]
        for g in basis:
            glead = g.leading_key
            if _divides(glead, lead):
                shift = (
                    tuple(u - v for u, v in zip(lead[0], glead[0])),
                    tuple(u - v for u, v in zip(lead[1], glead[1])),
                )
                current = current - g.left_multiply(shift, c / g.terms[glead])
                break
        else:
            remainder[lead] = c
            current = ExactOperator(current.var_count, {k: v for k, v in current.terms.items() if k != lead})
    return ExactOperator(f.var_count, remainder)


def s_polynomial(f: ExactOperator, g: ExactOperator) -> ExactOperator:
    """The left S-polynomial of ``f`` and ``g``."""
    (fa, fb), (ga, gb) = f.leading_key, g.leading_key
    lcm = (tuple(map(max, fa, ga)), tuple(map(max, fb, gb)))
    f_shift = (tuple(u - v for u, v in zip(lcm[0], fa)), tuple(u - v for u, v in zip(lcm[1], fb)))
    g_shift = (tuple(u - v for u, v in zip(lcm[0], ga)), tuple(u - v for u, v in zip(lcm[1], gb)))
    return f.left_multiply(f_shift, 1 / f.leading_coefficient) - g.left_multiply(g_shift, 1 / g.leading_coefficient)


class LeftBuchberger:
    """A single left Buchberger computation.

    Args:
        generators: The generators of the left ideal.
    """

    def __init__(self, generators: Sequence[ExactOperator]):
        self.generators = [g for g in generators if not g.is_zero]
        self.basis: list[ExactOperator] = []
        self.pairs: deque[tuple[int, int]] = deque()

    def _add(self, g: ExactOperator):
        g = g.monic()
        for i in range(len(self.basis)):
            self.pairs.append((i, len(self.basis)))
        self.basis.append(g)

    def run(self) -> list[ExactOperator]:
        for g in self.generators:
            r = normal_form(g, self.basis)
            if not r.is_zero:
                self._add(r)
        processed = 0
        while self.pairs:
            i, j = self.pairs.popleft()
            processed += 1
            r = normal_form(s_polynomial(self.basis[i], self.basis[j]), self.basis)
            if not r.is_zero:
                self._add(r)
        logger.debug("left Buchberger: %d pairs, %d elements", processed, len(self.basis))
        return interreduce(self.basis)


def interreduce(basis: Sequence[ExactOperator]) -> list[ExactOperator]:
    """The reduced monic basis with the same leading ideal."""
    ordered = sorted(basis, key=lambda g: term_key(g.leading_key))
    minimal: list[ExactOperator] = []
    for g in ordered:
        if not any(_divides(h.leading_key, g.leading_key) for h in minimal):
            minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        reduced.append(normal_form(g, others).monic())
    return sorted(reduced, key=lambda g: term_key(g.leading_key))


def is_unit_ideal(basis: Sequence[ExactOperator]) -> bool:
    return any(not any(g.leading_key[0] + g.leading_key[1]) for g in basis)


def left_buchberger(relations: Sequence[WeylOperator]) -> list[ExactOperator]:
    """A reduced left Groebner basis of the ideal generated by ``relations``."""
    return LeftBuchberger([ExactOperator.from_weyl(p) for p in relations]).run()


def initial_ideal(basis: Sequence[ExactOperator]) -> list[Poly]:
    """Initial forms of a Groebner basis under the order filtration."""
    return [g.initial_form() for g in basis]


def krull_dimension(ideal: Sequence[Poly], n: int) -> int:
    """The Krull dimension of ``Q(t)[x, xi] / ideal``, -1 for the unit ideal.

    The dimension is read off the leading monomials of a commutative Groebner basis as the
    size of a largest set of variables containing no leading-monomial support.
    """
    gens = symbol_ring(n)
    exprs = [p.as_expr() for p in ideal if not p.is_zero]
    if not exprs:
        return 2 * n
    basis = groebner(exprs, *gens, order="grevlex", domain=FIELD)
    supports = []
    for poly in basis.polys:
        lead = poly.monoms(order="grevlex")[0]
        if not any(lead):
            return -1
        supports.append({i for i, e in enumerate(lead) if e})
    for size in range(2 * n, -1, -1):
        for subset in combinations(range(2 * n), size):
            chosen = set(subset)
            if not any(support <= chosen for support in supports):
                return size
    return 0


@dataclass(frozen=True)
class FilteredPresentation:
    """A finite direct sum of cyclic modules ``D_n / D_n I_k``, filtered by order.

    Args:
        var_count: The number of variables.
        components: The relations of each cyclic component.
    """

    var_count: int
    components: tuple[tuple[WeylOperator, ...], ...]

    @classmethod
    def cyclic(cls, var_count: int, relations: Sequence[WeylOperator]) -> "FilteredPresentation":
        return cls(var_count, (tuple(relations),))

    @property
    def relations(self) -> tuple[WeylOperator, ...]:
        return tuple(p for component in self.components for p in component)

    @property
    def filtration_weights(self) -> tuple[int, ...]:
        """Weights of ``x_1..x_n, d_1..d_n``."""
        return (0,) * self.var_count + (1,) * self.var_count

    def to_sources(self) -> list[list[str]]:
        return [[p.to_source() for p in component] for component in self.components]


def _symbol_poly(p: WeylOperator) -> Poly:
    sigma = symbol(p)
    rep = {}
    for alpha, f in sigma.terms.items():
        for mono, series in f.terms.items():
            rep[mono + alpha] = field_element(series)
    return Poly.from_dict(rep, *symbol_ring(p.var_count), domain=FIELD).monic()


def is_holonomic(p: FilteredPresentation) -> CharVarietyReport:
    """Groebner basis, initial ideal and Krull dimension of every component.

    The characteristic dimension of a direct sum is the largest dimension of a nonzero component.
    """
    n = p.var_count
    dims: list[int] = []
    generators: list[list[str]] = []
    bases: list[list[str]] = []
    symbol_checks: list[bool] = []
    for component in p.components:
        basis = left_buchberger(component)
        bases.append([g.to_source() for g in basis])
        if is_unit_ideal(basis):
            dims.append(-1)
            generators.append(["1"])
            continue
        ideal = initial_ideal(basis)
        generators.append([str(q.as_expr()) for q in ideal])
        dims.append(krull_dimension(ideal, n))
        if len(component) == 1:
            symbol_checks.append(len(ideal) == 1 and ideal[0] == _symbol_poly(component[0]))
    char_dimension = max(dims, default=-1)
    zero_module = char_dimension < 0
    bernstein = zero_module or char_dimension >= n
    if not bernstein:
        logger.warning("characteristic dimension %d below %d: Bernstein counterexample candidate", char_dimension, n)
    principal: Optional[bool] = all(symbol_checks) if symbol_checks else None
    if principal is False:
        logger.warning("initial ideal of a principal relation differs from its symbol")
    return CharVarietyReport(
        var_count=n,
        initial_ideal_generators=generators,
        groebner_basis=bases,
        char_dimension=char_dimension,
        holonomic=zero_module or char_dimension == n,
        zero_module=zero_module,
        bernstein_bound_ok=bernstein,
        principal_symbol_agrees=principal,
    )

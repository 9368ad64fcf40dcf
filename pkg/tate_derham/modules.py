"""Chain-level models of D-modules as K-vector spaces with explicit actions of ``d_j`` and ``x_j``.

A model exposes a basis of labels ``(generator, x-monomial, d-tail)``, truncated by an x-degree
window and a d-tail window, and the action of each ``d_j`` and ``x_j`` on a label.  The
x-degree of ``d_j`` applied to a label grows by at most ``growth``; the d-tail grows by at most
one.  The de Rham complex of a model is assembled on forms ``m dx_I``, ``I`` a sorted tuple of
1-based indices.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from tate_derham.algebra.scalars import LaurentScalar
from tate_derham.algebra.tate import Monomial, format_monomial
from tate_derham.algebra.weyl import WeylOperator
from tate_derham.dmodule import ConnectionModule
from tate_derham.errors import InexactZero, WindowTooSmall
from tate_derham.linalg import ScalarMatrix

logger = logging.getLogger(__name__)

Label = tuple[int, Monomial, Monomial]
Form = tuple[int, ...]
Cell = tuple[Label, Form]
Element = dict
"""A finite linear combination, mapping labels or cells to scalars."""


def monomials(n: int, degree: int) -> list[Monomial]:
    """All exponent vectors in ``n`` variables of total degree at most ``degree``, in lexicographic order."""
    if n == 0:
        return [()]
    out = []
    for head in range(degree + 1):
        for tail in monomials(n - 1, degree - head):
            out.append((head,) + tail)
    return sorted(out)


def forms(n: int, k: int) -> list[Form]:
    return list(combinations(range(1, n + 1), k))


def add_term(acc: Element, key, value: LaurentScalar):
    """Add ``value * key`` into ``acc`` in place, dropping entries that cancel."""
    if value.is_exact_zero:
        return
    total = acc[key] + value if key in acc else value
    if total.is_zero:
        acc.pop(key, None)
    else:
        acc[key] = total


def combine(terms: Iterable[tuple[object, LaurentScalar]]) -> Element:
    acc: Element = {}
    for key, value in terms:
        add_term(acc, key, value)
    return acc


def wedge_sign(j: int, form: Form) -> int:
    """The sign of ``dx_j ^ dx_I`` against the sorted form, zero if ``j`` is in ``I``."""
    if j in form:
        return 0
    return -1 if sum(1 for i in form if i < j) % 2 else 1


def insert(j: int, form: Form) -> Form:
    return tuple(sorted(form + (j,)))


def describe_label(label: Label) -> str:
    s, mono, tail = label
    parts = [f"e{s}", format_monomial(mono, "x")]
    offset = len(mono)
    parts += [f"d{offset + i + 1}" + (f"^{b}" if b > 1 else "") for i, b in enumerate(tail) if b]
    return "*".join(p for p in parts if p)


def describe_cell(cell: Cell) -> str:
    label, form = cell
    if not form:
        return describe_label(label)
    return f"{describe_label(label)} " + "^".join(f"dx{i}" for i in form)


class ModuleModel:
    """Base class for chain-level module models.

    Args:
        var_count: The number of variables of the ambient polydisc.
        precision: The relative precision given to the rational constants of the actions.
    """

    def __init__(self, var_count: int, precision: int):
        self.var_count = var_count
        self.precision = precision

    @property
    def growth(self) -> int:
        """The largest increase of x-degree under any ``d_j``."""
        return 0

    def labels(self, window: int, tail: int) -> list[Label]:
        """The basis labels of x-degree at most ``window`` and d-tail degree at most ``tail``."""
        raise NotImplementedError

    def d(self, j: int, label: Label) -> Element:
        """The action of ``d_j`` on a basis label."""
        raise NotImplementedError

    def x(self, j: int, label: Label) -> Element:
        """The action of ``x_j`` on a basis label."""
        raise NotImplementedError

    def constant(self, value: int) -> LaurentScalar:
        return LaurentScalar.from_fraction(value, self.precision)

    def apply(self, action: Callable[[Label], Element], vector: Mapping[Label, LaurentScalar]) -> Element:
        acc: Element = {}
        for label, c in vector.items():
            for target, value in action(label).items():
                add_term(acc, target, c * value)
        return acc


class StructureSheafModel(ModuleModel):
    """``O = D_n / D_n (d_1, ..., d_n)``, spanned by the monomials ``x^a``."""

    def labels(self, window, tail):
        return [(0, a, ()) for a in monomials(self.var_count, window)]

    def d(self, j, label):
        _, a, _ = label
        if not a[j - 1]:
            return {}
        lowered = a[: j - 1] + (a[j - 1] - 1,) + a[j:]
        return {(0, lowered, ()): self.constant(a[j - 1])}

    def x(self, j, label):
        _, a, _ = label
        return {(0, a[: j - 1] + (a[j - 1] + 1,) + a[j:], ()): self.constant(1)}


class ConnectionModel(ModuleModel):
    """``K<x>^r`` with ``d_1`` acting through ``d/dx + A``."""

    def __init__(self, connection: ConnectionModule, precision: int):
        super().__init__(1, precision)
        self.connection = connection

    @property
    def growth(self):
        return self.connection.growth

    def labels(self, window, tail):
        return [(s, (j,), ()) for j in range(window + 1) for s in range(self.connection.rank)]

    @cached_property
    def _columns(self) -> list[list[tuple[int, int, LaurentScalar]]]:
        """Per generator ``s``, the terms ``(s', k, c)`` of ``A e_s = sum c x^k e_s'``."""
        r = self.connection.rank
        out = []
        for s in range(r):
            column = []
            for s2 in range(r):
                entry = self.connection.matrix[s2][s]
                for (k,), series in entry.terms.items():
                    column.append((s2, k, LaurentScalar.from_series(series, entry.absprec)))
            out.append(column)
        return out

    def d(self, j, label):
        s, (e,), _ = label
        terms = [((s2, (e + k,), ()), c) for s2, k, c in self._columns[s]]
        if e:
            terms.append(((s, (e - 1,), ()), self.constant(e)))
        return combine(terms)

    def x(self, j, label):
        s, (e,), _ = label
        return {(s, (e + 1,), ()): self.constant(1)}


class PushforwardModel(ModuleModel):
    """The direct image ``i_+ M = M[d_(r+1), ..., d_n]`` along ``x_(r+1) = ... = x_n = 0``.

    A label ``(s, a, b)`` stands for ``d^b`` applied to the base label ``(s, a)``.  The
    transversal ``d_j`` shift the tail and the transversal ``x_j`` lower it, with
    ``x_j d_j^b = -b d_j^(b-1)`` on the image.
    """

    def __init__(self, base: ModuleModel, var_count: int):
        if var_count <= base.var_count:
            raise ValueError("the ambient dimension must exceed the source dimension")
        super().__init__(var_count, base.precision)
        self.base = base
        self.codimension = var_count - base.var_count

    @property
    def growth(self):
        return self.base.growth

    def labels(self, window, tail):
        tails = monomials(self.codimension, tail)
        return sorted(
            ((s, a, b) for s, a, _ in self.base.labels(window, 0) for b in tails),
            key=lambda label: (label[1], label[2], label[0]),
        )

    def _lift(self, image: Element, b: Monomial) -> Element:
        return {(s, a, b): c for (s, a, _), c in image.items()}

    def d(self, j, label):
        s, a, b = label
        r = self.base.var_count
        if j <= r:
            return self._lift(self.base.d(j, (s, a, ())), b)
        k = j - r - 1
        return {(s, a, b[:k] + (b[k] + 1,) + b[k + 1 :]): self.constant(1)}

    def x(self, j, label):
        s, a, b = label
        r = self.base.var_count
        if j <= r:
            return self._lift(self.base.x(j, (s, a, ())), b)
        k = j - r - 1
        if not b[k]:
            return {}
        return {(s, a, b[:k] + (b[k] - 1,) + b[k + 1 :]): self.constant(-b[k])}


def act_operator(model: ModuleModel, p: WeylOperator, vector: Mapping[Label, LaurentScalar]) -> Element:
    """The action of ``p = sum f_alpha d^alpha`` on a finite combination of labels."""
    if p.var_count != model.var_count:
        raise ValueError(f"operator in {p.var_count} variables acting on a model in {model.var_count}")
    result: Element = {}
    for alpha, f in p.terms.items():
        moved = dict(vector)
        for j, k in enumerate(alpha, start=1):
            for _ in range(k):
                moved = model.apply(lambda label, j=j: model.d(j, label), moved)
        for mono, series in f.terms.items():
            scaled = moved
            for j, k in enumerate(mono, start=1):
                for _ in range(k):
                    scaled = model.apply(lambda label, j=j: model.x(j, label), scaled)
            c = LaurentScalar.from_series(series, f.absprec)
            for label, value in scaled.items():
                add_term(result, label, c * value)
    return result


def dr_differential(model: ModuleModel, element: Mapping[Cell, LaurentScalar]) -> Element:
    """``delta(m dx_I) = sum_j d_j m dx_j ^ dx_I`` on a finite combination of cells."""
    acc: Element = {}
    for (label, form), c in element.items():
        for j in range(1, model.var_count + 1):
            sign = wedge_sign(j, form)
            if not sign:
                continue
            target_form = insert(j, form)
            for target, value in model.d(j, label).items():
                add_term(acc, (target, target_form), c * value * model.constant(sign))
    return acc


def linear_map_matrix(
    function: Callable[[Cell], Element], sources: Sequence, targets: Sequence, precision: int
) -> ScalarMatrix:
    """The matrix of a linear map given on basis elements.

    Raises:
        WindowTooSmall: If an image leaves the span of ``targets``.
    """
    index = {cell: i for i, cell in enumerate(targets)}
    values = {}
    for col, cell in enumerate(sources):
        for target, value in function(cell).items():
            if target not in index:
                raise WindowTooSmall(f"image of {cell} leaves the target window at {target}")
            values[(index[target], col)] = value
    return ScalarMatrix.from_sparse(len(targets), len(sources), values, precision)


def cells(model: ModuleModel, degree: int, window: int, tail: int) -> list[Cell]:
    """The basis ``label dx_I`` of the degree-``degree`` term, forms varying fastest."""
    return [(label, form) for label in model.labels(window, tail) for form in forms(model.var_count, degree)]


@dataclass(frozen=True)
class TruncatedComplex:
    """The de Rham complex of a model truncated to windows.

    The degree-``k`` term uses the x-degree window ``window + k * growth`` and the tail window
    ``tail + k``, so every ``delta^k`` is the restriction of the true differential.

    Args:
        model: The module model.
        window: The x-degree window of degree zero.
        tail: The d-tail window of degree zero.
        precision: The working precision.
        bases: The basis cells of each degree.
        differentials: The matrices of ``delta^k``, ``k = 0 .. n-1``.
    """

    model: ModuleModel
    window: int
    tail: int
    precision: int
    bases: tuple[tuple[Cell, ...], ...]
    differentials: tuple[ScalarMatrix, ...]

    @classmethod
    def build(cls, model: ModuleModel, window: int, tail: int, precision: int) -> "TruncatedComplex":
        """Assemble the complex and check ``delta^(k+1) delta^k = 0``.

        Raises:
            WindowTooSmall: If a window is negative.
            InexactZero: If a composition of differentials is not zero at the working precision.
        """
        if window < 0 or tail < 0:
            raise WindowTooSmall(f"windows must be nonnegative, got ({window}, {tail})")
        n = model.var_count
        g = model.growth
        bases = tuple(tuple(cells(model, k, window + k * g, tail + k)) for k in range(n + 1))
        one = model.constant(1)
        differentials = tuple(
            linear_map_matrix(lambda cell: dr_differential(model, {cell: one}), bases[k], bases[k + 1], precision)
            for k in range(n)
        )
        for k in range(n - 1):
            composite = differentials[k + 1] @ differentials[k]
            if any(not value.is_zero for row in composite.entries for value in row):
                raise InexactZero(f"delta^{k + 1} delta^{k} does not vanish at precision {precision}")
        logger.debug("truncated complex at window (%d, %d): %s", window, tail, [len(b) for b in bases])
        return cls(model, window, tail, precision, bases, differentials)

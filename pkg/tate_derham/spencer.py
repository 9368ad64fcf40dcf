"""The Spencer complex of the Weyl algebra in the coordinate frame and its de Rham dual.

``Sp^-k`` is free of rank ``binom(n, k)`` on the wedges ``theta_I = d_(i_1) ^ ... ^ d_(i_k)``
and the differential sends ``P theta_I`` to ``sum_l (-1)^(l+1) P d_(i_l) theta_(I - i_l)``.
The bracket terms vanish because the coordinate vector fields commute.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from tate_derham.algebra.scalars import LaurentScalar
from tate_derham.algebra.tate import Monomial
from tate_derham.algebra.weyl import WeylOperator, multiply
from tate_derham.errors import WindowTooSmall
from tate_derham.linalg import ScalarMatrix, rank_report
from tate_derham.models import OffendingEntry, ResolutionReport, SpencerReport
from tate_derham.modules import (
    Cell,
    Form,
    ModuleModel,
    TruncatedComplex,
    act_operator,
    add_term,
    describe_cell,
    forms,
    linear_map_matrix,
    monomials,
)
from tate_derham.settings import app_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpencerComplex:
    """The Spencer complex ``Sp^-n -> ... -> Sp^0`` of ``D_n``.

    Args:
        n: The number of variables.
        bases: The wedges ``theta_I`` of each term, indexed by ``k`` for degree ``-k``.
        differentials: ``differentials[k - 1][J][I]`` is the operator ``Q`` with
            ``theta_I -> ... + Q theta_J + ...``, for ``k = 1 .. n``.
    """

    n: int
    bases: tuple[tuple[Form, ...], ...]
    differentials: tuple[tuple[tuple[WeylOperator, ...], ...], ...]

    @property
    def ranks(self) -> list[int]:
        """The ranks in degrees ``-n .. 0``."""
        return [len(self.bases[k]) for k in range(self.n, -1, -1)]

    def entry(self, k: int, target: Form, source: Form) -> WeylOperator:
        """The entry of the differential out of degree ``-k``."""
        return self.differentials[k - 1][self.bases[k - 1].index(target)][self.bases[k].index(source)]


def build_spencer(n: int, precision: Optional[int] = None) -> SpencerComplex:
    """The Spencer complex of ``D_n`` with entries ``+-d_i`` or zero."""
    if not 1 <= n <= 3:
        raise ValueError(f"Spencer complexes are built for 1 <= n <= 3, got {n}")
    precision = precision or app_settings.precision.T_PRECISION
    bases = tuple(tuple(combinations(range(1, n + 1), k)) for k in range(n + 1))
    zero = WeylOperator.zero(n)
    differentials = []
    for k in range(1, n + 1):
        rows = [[zero] * len(bases[k]) for _ in bases[k - 1]]
        for col, form in enumerate(bases[k]):
            for l, i in enumerate(form):
                d = WeylOperator.d(i, n, precision)
                rows[bases[k - 1].index(form[:l] + form[l + 1 :])][col] = d if l % 2 == 0 else -d
        differentials.append(tuple(tuple(row) for row in rows))
    return SpencerComplex(n, bases, tuple(differentials))


def compositions_vanish(sp: SpencerComplex) -> bool:
    """Whether every composition of successive differentials is the zero operator.

    Elements act by right multiplication, so the composite entry is ``sum_J A[J][I] * B[K][J]``.
    """
    for k in range(2, sp.n + 1):
        for source in sp.bases[k]:
            for target in sp.bases[k - 2]:
                total = WeylOperator.zero(sp.n)
                for middle in sp.bases[k - 1]:
                    first = sp.entry(k, middle, source)
                    second = sp.entry(k - 1, target, middle)
                    if not first.is_zero and not second.is_zero:
                        total = total + multiply(first, second)
                if not total.is_zero:
                    logger.warning("Spencer composition into %s from %s is %s", target, source, total.to_source())
                    return False
    return True


def hom_differential(sp: SpencerComplex, model: ModuleModel, cell: Cell) -> dict:
    """``(d phi)(theta_I') = sum_l (-1)^(l+1) d_(i_l) phi(theta_(I' - i_l))`` on a basis cell ``m theta_I``.

    A cell ``(m, I)`` stands for the homomorphism sending ``theta_I`` to ``m`` and the other wedges to zero.
    """
    label, form = cell
    k = len(form)
    out: dict = {}
    if k >= sp.n:
        return out
    for target in sp.bases[k + 1]:
        if not set(form) <= set(target):
            continue
        operator = sp.entry(k + 1, form, target)
        for image, value in act_operator(model, operator, {label: model.constant(1)}).items():
            add_term(out, (image, target), value)
    return out


def hom_spencer_equals_dr(model: ModuleModel, window: Optional[int] = None) -> SpencerReport:
    """Compare ``Hom(Sp^-k, M)`` with the de Rham complex of ``M`` on truncated bases."""
    window = app_settings.window.X_DEG_START if window is None else window
    n = model.var_count
    if n > 2:
        raise ValueError(f"the comparison is carried out for n <= 2, got {n}")
    sp = build_spencer(n, model.precision)
    dr = TruncatedComplex.build(model, window, app_settings.window.TAIL, model.precision)
    offending: list[OffendingEntry] = []
    for k in range(n):
        hom = linear_map_matrix(
            lambda cell: hom_differential(sp, model, cell), dr.bases[k], dr.bases[k + 1], model.precision
        )
        difference = hom - dr.differentials[k]
        for i, row in enumerate(difference.entries):
            for j, value in enumerate(row):
                if not value.is_zero:
                    offending.append(
                        OffendingEntry(
                            degree=k,
                            row=describe_cell(dr.bases[k + 1][i]),
                            column=describe_cell(dr.bases[k][j]),
                            value=str(value),
                        )
                    )
    logger.debug("Spencer and de Rham matrices compared at window %d: %d offending", window, len(offending))
    return SpencerReport(
        n=n, ranks=sp.ranks, compositions_zero=compositions_vanish(sp), equal=not offending, offending=offending
    )


ResolutionCell = tuple[Monomial, Monomial, Form]


def _spencer_image(cell: ResolutionCell, one: LaurentScalar) -> dict:
    a, b, form = cell
    out = {}
    for l, i in enumerate(form):
        raised = b[: i - 1] + (b[i - 1] + 1,) + b[i:]
        out[(a, raised, form[:l] + form[l + 1 :])] = one if l % 2 == 0 else -one
    return out


def resolution_check_truncated(n: int, window: int, precision: Optional[int] = None) -> ResolutionReport:
    """Exactness of ``Sp -> O -> 0`` on the basis ``x^a d^b theta_I`` with ``|a| <= window`` and
    ``|b| + |I| <= window``.

    The differential preserves ``a`` and the weight ``|b| + |I|``, so the truncation is a subcomplex.

    Raises:
        WindowTooSmall: If ``window < n``, where the top term vanishes from the truncation.
    """
    if not 1 <= n <= 2:
        raise ValueError(f"the resolution is checked for n <= 2, got {n}")
    if window < n:
        raise WindowTooSmall(f"weight window {window} cannot hold the top Spencer term for n={n}")
    precision = precision or app_settings.precision.T_PRECISION
    one = LaurentScalar.one(precision)
    xs = monomials(n, window)
    terms = [
        [(a, b, form) for a in xs for b in monomials(n, window - k) for form in forms(n, k)] for k in range(n + 1)
    ]
    structure = [(a, (), ()) for a in xs]
    dims = [len(terms[k]) for k in range(n, -1, -1)] + [len(structure)]
    ranks = []
    for k in range(n, 0, -1):
        matrix = linear_map_matrix(lambda cell: _spencer_image(cell, one), terms[k], terms[k - 1], precision)
        ranks.append(rank_report(matrix).rank)

    def augment(cell):
        a, b, _ = cell
        return {} if any(b) else {(a, (), ()): one}

    augmentation: ScalarMatrix = linear_map_matrix(augment, terms[0], structure, precision)
    ranks.append(rank_report(augmentation).rank)
    # ranks[i] leaves dims[i]; dims[i] also receives ranks[i - 1]
    homology = [dims[i] - ranks[i] - (ranks[i - 1] if i else 0) for i in range(n + 1)]
    homology.append(dims[n + 1] - ranks[n])
    logger.debug("truncated Spencer resolution, n=%d window=%d: homology %s", n, window, homology)
    return ResolutionReport(
        n=n,
        window=window,
        dims=dims,
        ranks=ranks,
        homology=homology,
        augmentation_surjective=ranks[n] == dims[n + 1],
        exact=not any(homology),
    )


"""Direct images along the coordinate embedding ``{x_(r+1) = ... = x_n = 0}`` of the polydisc.

Presentations are transported by extending relations to ``n`` variables and adding the cut-out
coordinates.  The de Rham side is checked on chain-level models: cohomology of the source and of
its direct image, the chain map ``alpha -> alpha ^ eta`` with ``eta = dx_(r+1) ^ ... ^ dx_n``,
and the contracting homotopy on its cokernel.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from tate_derham.algebra.scalars import LaurentScalar
from tate_derham.algebra.tate import TateElement
from tate_derham.algebra.weyl import WeylOperator, transpose
from tate_derham.dmodule import ConnectionModule, CyclicModule, cyclic_to_connection, enlarged_window, stabilize
from tate_derham.errors import IndexOutOfRange, UnsupportedPresentation
from tate_derham.groebner import FilteredPresentation
from tate_derham.linalg import ScalarMatrix, kernel_basis, rank_report, relative_rank
from tate_derham.models import ChainMapReport, HomotopyReport, OffendingEntry, ShiftCheckReport
from tate_derham.modules import (
    Cell,
    ConnectionModel,
    Element,
    ModuleModel,
    PushforwardModel,
    StructureSheafModel,
    TruncatedComplex,
    add_term,
    cells,
    describe_cell,
    dr_differential,
    linear_map_matrix,
)
from tate_derham.settings import app_settings

logger = logging.getLogger(__name__)

Source = Union[FilteredPresentation, ConnectionModule]


@dataclass(frozen=True)
class EmbeddingData:
    """The embedding of the r-dimensional polydisc cut out by the last ``n - r`` coordinates.

    Raises:
        IndexOutOfRange: Unless ``1 <= r < n``.
    """

    r: int
    n: int

    def __post_init__(self):
        if not 1 <= self.r < self.n:
            raise IndexOutOfRange(f"embedding needs 1 <= r < n, got r={self.r}, n={self.n}")

    @property
    def codimension(self) -> int:
        return self.n - self.r


def extend(p: WeylOperator, n: int) -> WeylOperator:
    """The image of ``p`` under the inclusion of the first variables into ``n`` variables."""
    pad = (0,) * (n - p.var_count)
    terms = {}
    for alpha, f in p.terms.items():
        coefficient_terms = {mono + pad: series for mono, series in f.terms.items()}
        terms[alpha + pad] = TateElement.build(n, coefficient_terms, f.absprec)
    return WeylOperator.build(n, terms, p.absprec)


def restrict(p: WeylOperator, r: int) -> Optional[WeylOperator]:
    """The operator in the first ``r`` variables, or None if ``p`` involves a later one."""
    terms = {}
    for alpha, f in p.terms.items():
        if any(alpha[r:]) or any(any(mono[r:]) for mono in f.terms):
            return None
        terms[alpha[:r]] = TateElement.build(r, {mono[:r]: series for mono, series in f.terms.items()}, f.absprec)
    return WeylOperator.build(r, terms, p.absprec)


def push_forward_presentation(
    source: Union[FilteredPresentation, Sequence[WeylOperator]], e: EmbeddingData, precision: Optional[int] = None
) -> FilteredPresentation:
    """``i_+`` of a presentation: each component gains the relations ``x_(r+1), ..., x_n``.

    The new relations are known to relative precision ``precision``.
    """
    if not isinstance(source, FilteredPresentation):
        source = FilteredPresentation.cyclic(e.r, list(source))
    if source.var_count != e.r:
        raise IndexOutOfRange(f"presentation in {source.var_count} variables, embedding source has {e.r}")
    precision = precision or app_settings.precision.T_PRECISION
    cut_out = tuple(WeylOperator.x(j, e.n, precision) for j in range(e.r + 1, e.n + 1))
    components = tuple(tuple(extend(p, e.n) for p in component) + cut_out for component in source.components)
    return FilteredPresentation(e.n, components)


def transport_filtration_dim(source_char_dim: int, e: EmbeddingData) -> int:
    """The characteristic dimension of the direct image of a module of dimension ``source_char_dim``."""
    if not 0 <= source_char_dim <= 2 * e.r:
        raise ValueError(f"characteristic dimension {source_char_dim} outside 0..{2 * e.r}")
    return source_char_dim + e.codimension


def side_change(relations: Sequence[WeylOperator]) -> list[WeylOperator]:
    """Convert a left presentation to the right one, and back, through the involution."""
    return [transpose(p) for p in relations]


def _is_coordinate_derivations(relations: Sequence[WeylOperator], n: int) -> bool:
    sources = sorted(p.to_source() for p in relations)
    return sources == sorted(f"d{i}" for i in range(1, n + 1))


def _base_model(relations: Sequence[WeylOperator], n: int, precision: int) -> ModuleModel:
    if _is_coordinate_derivations(relations, n):
        return StructureSheafModel(n, precision)
    if n == 1 and len(relations) == 1:
        return ConnectionModel(cyclic_to_connection(CyclicModule(relations[0])), precision)
    raise UnsupportedPresentation("no chain-level model for " + ", ".join(p.to_source() for p in relations))


def model_for(source: Source, precision: Optional[int] = None) -> ModuleModel:
    """A chain-level model of a connection or of a recognized presentation.

    Recognized presentations are the structure sheaf (relations ``d_1, ..., d_n``), a cyclic
    module on the disc, and direct images of these along coordinate embeddings.

    Raises:
        UnsupportedPresentation: If the presentation has none of these shapes.
    """
    precision = precision or app_settings.precision.T_PRECISION
    if isinstance(source, ConnectionModule):
        return ConnectionModel(source, precision)
    if len(source.components) != 1:
        raise UnsupportedPresentation("chain-level models cover cyclic presentations only")
    relations = list(source.components[0])
    n = source.var_count
    if n > 3:
        raise UnsupportedPresentation(f"chain-level models cover at most three variables, got {n}")
    cut = [j for j in range(1, n + 1) if any(p.to_source() == f"x{j}" for p in relations)]
    r = n - len(cut)
    if cut and cut == list(range(r + 1, n + 1)) and r >= 1:
        base = [restrict(p, r) for p in relations if p.to_source() not in {f"x{j}" for j in cut}]
        if all(p is not None for p in base):
            return PushforwardModel(_base_model(base, r, precision), n)
    return _base_model(relations, n, precision)


def build_dr_complex(
    source: Source, window: int, precision: Optional[int] = None, tail: Optional[int] = None
) -> TruncatedComplex:
    """The truncated de Rham complex of a recognized presentation or connection.

    Raises:
        UnsupportedPresentation: If no chain-level model is available.
        WindowTooSmall: If a window is negative.
    """
    precision = precision or app_settings.precision.T_PRECISION
    model = model_for(source, precision)
    return TruncatedComplex.build(model, window, app_settings.window.TAIL if tail is None else tail, precision)


def complex_dims(model: ModuleModel, window: int, tail: int, precision: int) -> tuple[tuple[int, ...], bool]:
    """Cohomology dimensions of the de Rham complex of ``model`` at one window.

    ``H^i`` is the span of the cocycles of the small complex modulo the coboundaries of a
    complex enlarged by ``(precision + 1) * (growth + 1)`` in x-degree and one in tail degree.
    """
    n = model.var_count
    small = TruncatedComplex.build(model, window, tail, precision)
    big = TruncatedComplex.build(model, enlarged_window(window, precision, model.growth), tail + 1, precision)
    one = LaurentScalar.one(precision)
    zero = LaurentScalar.zero()
    reliable = True
    dims = []
    for i in range(n + 1):
        if i < n:
            report = rank_report(small.differentials[i])
            reliable = reliable and report.reliable
            cocycles = kernel_basis(small.differentials[i])
        else:
            size = len(small.bases[n])
            cocycles = [tuple(one if k == j else zero for k in range(size)) for j in range(size)]
        if i == 0:
            dims.append(len(cocycles))
            continue
        index = {cell: k for k, cell in enumerate(big.bases[i])}
        positions = [index[cell] for cell in small.bases[i]]
        embedded = []
        for vector in cocycles:
            full = [zero] * len(big.bases[i])
            for k, value in zip(positions, vector):
                full[k] = value
            embedded.append(tuple(full))
        h, report = relative_rank(big.differentials[i - 1], embedded)
        reliable = reliable and report.reliable
        dims.append(h)
    return tuple(dims), reliable


def model_cohomology(
    model: ModuleModel, window: Optional[int] = None, x_deg_max: Optional[int] = None, tail: Optional[int] = None
) -> tuple[int, tuple[int, ...], bool, list[list[int]]]:
    """Cohomology dimensions of ``model``, doubling the window until they stabilize."""
    start = window or app_settings.window.X_DEG_START
    cap = x_deg_max or app_settings.window.X_DEG_MAX
    tail = app_settings.window.TAIL if tail is None else tail
    return stabilize(lambda w: complex_dims(model, w, tail, model.precision), start, cap, "model cohomology")


def dr_shift_check(
    source: Source,
    e: EmbeddingData,
    window: Optional[int] = None,
    precision: Optional[int] = None,
    x_deg_max: Optional[int] = None,
    tail: Optional[int] = None,
) -> ShiftCheckReport:
    """Compare ``H^i`` of the source with ``H^(i+c)`` of its direct image.

    Raises:
        NoStabilization: If the dimensions are still moving at the cap.
    """
    precision = precision or app_settings.precision.T_PRECISION
    base = model_for(source, precision)
    if base.var_count != e.r:
        raise IndexOutOfRange(f"source in {base.var_count} variables, embedding source has {e.r}")
    pushed = PushforwardModel(base, e.n)
    tail = app_settings.window.TAIL if tail is None else tail

    def compute(w: int):
        source_dims, ok = complex_dims(base, w, tail, precision)
        pushed_dims, pushed_ok = complex_dims(pushed, w, tail, precision)
        return source_dims + pushed_dims, ok and pushed_ok

    start = window or app_settings.window.X_DEG_START
    cap = x_deg_max or app_settings.window.X_DEG_MAX
    final, dims, reliable, _ = stabilize(compute, start, cap, "direct image cohomology")
    source_dims, pushed_dims = list(dims[: e.r + 1]), list(dims[e.r + 1 :])
    c = e.codimension
    equal = all(pushed_dims[j] == 0 for j in range(c)) and all(
        source_dims[i] == pushed_dims[i + c] for i in range(e.r + 1)
    )
    return ShiftCheckReport(
        codimension=c,
        source_dims=source_dims,
        pushforward_dims=pushed_dims,
        degree_window=final,
        stabilized=True,
        reliable=reliable,
        equal=equal,
    )


def _eta(e: EmbeddingData) -> tuple[int, ...]:
    return tuple(range(e.r + 1, e.n + 1))


def chain_map(pushed: PushforwardModel, cell: Cell, eta: tuple[int, ...]) -> Element:
    """``f(m dx_I) = m dx_I ^ eta`` with ``m`` at tail zero."""
    (s, a, _), form = cell
    return {((s, a, (0,) * pushed.codimension), form + eta): pushed.constant(1)}


def _offending(degree: int, difference: Element, column: Cell) -> list[OffendingEntry]:
    return [
        OffendingEntry(degree=degree, row=describe_cell(row), column=describe_cell(column), value=str(value))
        for row, value in difference.items()
        if not value.is_zero
    ]


def _difference(left: Element, right: Element) -> Element:
    out = dict(left)
    for key, value in right.items():
        add_term(out, key, -value)
    return out


def chain_map_verify(
    source: Source, e: EmbeddingData, window: Optional[int] = None, precision: Optional[int] = None
) -> ChainMapReport:
    """Check ``f delta = delta f`` entrywise and that every ``f^i`` is injective."""
    precision = precision or app_settings.precision.T_PRECISION
    window = app_settings.window.X_DEG_START if window is None else window
    base = model_for(source, precision)
    pushed = PushforwardModel(base, e.n)
    eta = _eta(e)
    g = base.growth
    one = base.constant(1)
    offending: list[OffendingEntry] = []
    injective = True
    for i in range(e.r + 1):
        sources = cells(base, i, window + i * g, 0)
        for cell in sources:
            left = {}
            for target, value in dr_differential(base, {cell: one}).items():
                for image, c in chain_map(pushed, target, eta).items():
                    add_term(left, image, value * c)
            right = dr_differential(pushed, chain_map(pushed, cell, eta))
            offending += _offending(i, _difference(left, right), cell)
        targets = cells(pushed, i + e.codimension, window + i * g, 0)
        f = linear_map_matrix(lambda cell: chain_map(pushed, cell, eta), sources, targets, precision)
        if kernel_basis(f):
            injective = False
    logger.debug("chain map check at window %d: %d offending entries", window, len(offending))
    return ChainMapReport(commutes=not offending, injective=injective, offending=offending)


def _in_image(pushed: PushforwardModel, cell: Cell) -> bool:
    (_, _, b), form = cell
    return not any(b) and pushed.var_count in form


def project(pushed: PushforwardModel, element: Element) -> Element:
    """The image of an element in the cokernel of the chain map."""
    return {cell: value for cell, value in element.items() if not _in_image(pushed, cell)}


def homotopy(pushed: PushforwardModel, degree: int, cell: Cell) -> Element:
    """``h(alpha + d_n beta ^ dx_n) = (-1)^(degree+1) beta`` on a basis cell of the cokernel."""
    (s, a, b), form = cell
    n = pushed.var_count
    if n not in form or not b[-1]:
        return {}
    sign = -1 if degree % 2 == 0 else 1
    lowered = b[:-1] + (b[-1] - 1,)
    return {((s, a, lowered), form[:-1]): pushed.constant(sign)}


def homotopy_verify(
    source: Source,
    e: EmbeddingData,
    window: Optional[int] = None,
    precision: Optional[int] = None,
    tail: Optional[int] = None,
) -> HomotopyReport:
    """Check ``delta h + h delta = Id`` on the cokernel of the chain map, basis cell by basis cell.

    Raises:
        UnsupportedPresentation: If the codimension is not one.
    """
    if e.codimension != 1:
        raise UnsupportedPresentation("the contracting homotopy is built for codimension one")
    precision = precision or app_settings.precision.T_PRECISION
    window = app_settings.window.X_DEG_START if window is None else window
    base = model_for(source, precision)
    pushed = PushforwardModel(base, e.n)
    g = base.growth
    tail = max(app_settings.window.TAIL if tail is None else tail, 1)
    one = pushed.constant(1)
    offending: list[OffendingEntry] = []
    sizes = []
    degrees = list(range(e.n + 1))
    for t in degrees:
        basis = [cell for cell in cells(pushed, t, window + t * g, tail + t) if not _in_image(pushed, cell)]
        sizes.append(len(basis))
        for cell in basis:
            total: Element = {}
            for target, value in homotopy(pushed, t, cell).items():
                for image, c in project(pushed, dr_differential(pushed, {target: one})).items():
                    add_term(total, image, value * c)
            for target, value in project(pushed, dr_differential(pushed, {cell: one})).items():
                for image, c in homotopy(pushed, t + 1, target).items():
                    add_term(total, image, value * c)
            offending += _offending(t, _difference(total, {cell: one}), cell)
    logger.debug("homotopy check on %s cells: %d offending entries", sizes, len(offending))
    return HomotopyReport(holds=not offending, checked_degrees=degrees, basis_sizes=sizes, offending=offending)


def homotopy_matrix(pushed: PushforwardModel, degree: int, window: int, tail: int, precision: int) -> ScalarMatrix:
    """The matrix of ``h^degree`` from the cokernel basis in degree ``degree`` to degree ``degree - 1``."""
    g = pushed.growth
    sources = [c for c in cells(pushed, degree, window + degree * g, tail + degree) if not _in_image(pushed, c)]
    targets = [c for c in cells(pushed, degree - 1, window + degree * g, tail + degree) if not _in_image(pushed, c)]
    return linear_map_matrix(lambda cell: homotopy(pushed, degree, cell), sources, targets, precision)

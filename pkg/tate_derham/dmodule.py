"""Connections on the one-variable Tate disc and their de Rham cohomology.

A connection ``d/dx + A`` on K<x>^r is truncated to the x-degree window ``V_D`` (polynomials of
degree at most ``D``) and mapped into ``V_(D+g)``, where ``g`` is the x-degree growth of ``A``,
so the truncated matrix is a genuine restriction of the connection.  ``h0`` is its kernel
dimension.  ``h1`` is the dimension of ``V_D`` modulo the image of a larger window
``V_(D+(p+1)(g+1))``, wide enough to hold the approximate preimages of ``V_D`` at precision
``p``.  The window doubles until two successive windows agree.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import sympy
from sympy import QQ, Poly
from sympy.polys.matrices import DomainMatrix

from tate_derham.algebra.scalars import LaurentScalar
from tate_derham.algebra.tate import TateElement
from tate_derham.algebra.weyl import WeylOperator, invert_unit
from tate_derham.errors import (
    InconclusiveRoute,
    LeadingCoefficientNotUnit,
    NoModelAvailable,
    NoStabilization,
    NotAUnit,
    UnsupportedPresentation,
)
from tate_derham.linalg import ScalarMatrix, kernel_basis, rank_report, relative_rank
from tate_derham.models import (
    ChiTransferReport,
    DrReport,
    HatInvarianceReport,
    ResidueEulerReport,
    SpectralEstimate,
)
from tate_derham.models.types import ModelVerdict
from tate_derham.settings import app_settings

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")


@dataclass(frozen=True)
class ConnectionModule:
    """The connection ``d/dx + A`` on K<x>^r.

    Args:
        matrix: The r x r connection matrix of one-variable Tate elements.
    """

    matrix: tuple[tuple[TateElement, ...], ...]

    def __post_init__(self):
        r = len(self.matrix)
        if any(len(row) != r for row in self.matrix):
            raise ValueError("connection matrix must be square")
        if any(entry.var_count != 1 for row in self.matrix for entry in row):
            raise ValueError("connection matrix entries must be in one variable")

    @classmethod
    def scalar(cls, value: TateElement) -> "ConnectionModule":
        return cls(((value,),))

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def growth(self) -> int:
        """The x-degree growth ``max(0, deg A)``."""
        return max([0] + [entry.degree() for row in self.matrix for entry in row])

    def is_integral(self) -> bool:
        return all(entry.is_zero or entry.scale >= 0 for row in self.matrix for entry in row)

    def spectral(self, k_max: Optional[int] = None) -> SpectralEstimate:
        return spectral_radius_estimate(self, k_max or app_settings.window.SPECTRAL_K_MAX)

    def to_sources(self) -> list[list[str]]:
        return [[entry.to_source() for entry in row] for row in self.matrix]


@dataclass(frozen=True)
class CyclicModule:
    """The cyclic module ``D_1 / D_1 P``."""

    relation: WeylOperator

    def __post_init__(self):
        if self.relation.var_count != 1:
            raise ValueError("cyclic modules on the disc have one variable")
        if self.relation.is_zero:
            raise ValueError("relation vanishes at its precision")


def _constant(value: int, precision: int) -> TateElement:
    return TateElement.constant(LaurentScalar.from_fraction(value, precision), 1)


def cyclic_to_connection(m: CyclicModule) -> ConnectionModule:
    """Companion form of ``P = sum f_k d^k``.

    With ``b_k = f_m^-1 f_k`` the matrix has ``-1`` on the superdiagonal and ``b_0..b_(m-1)`` on
    the last row, so a first-order relation ``d + a`` gives ``A = (a)``.

    Raises:
        LeadingCoefficientNotUnit: If ``f_m`` is not a unit of the Tate algebra.
        UnsupportedPresentation: If ``P`` has order zero.
    """
    p = m.relation
    order = p.order
    if order < 1:
        raise UnsupportedPresentation("a relation of order zero has no companion form")
    try:
        lead_inverse = p.coefficient((order,)).invert_unit()
    except NotAUnit as err:
        raise LeadingCoefficientNotUnit(f"leading coefficient of {p.to_source()} is not a unit") from err
    precision = p.precision
    zero = TateElement.zero(1)
    rows = [[zero] * order for _ in range(order)]
    for k in range(order - 1):
        rows[k][k + 1] = _constant(-1, precision)
    for k in range(order):
        rows[order - 1][k] = lead_inverse * p.coefficient((k,))
    return ConnectionModule(tuple(tuple(row) for row in rows))


def connection_matrix(m: ConnectionModule, window: int, precision: int) -> ScalarMatrix:
    """The matrix of the connection from ``V_window`` to ``V_(window + growth)``.

    Basis vectors ``x^j e_s`` are ordered by ``j`` and then by ``s``.
    """
    r = m.rank
    target = window + m.growth
    values: dict[tuple[int, int], LaurentScalar] = {}

    def add(row: int, col: int, value: LaurentScalar):
        values[(row, col)] = values[(row, col)] + value if (row, col) in values else value

    for j in range(window + 1):
        for s in range(r):
            col = j * r + s
            if j:
                add((j - 1) * r + s, col, LaurentScalar.from_fraction(j, precision))
            for s2 in range(r):
                entry = m.matrix[s2][s]
                for (k,), series in entry.terms.items():
                    add((j + k) * r + s2, col, LaurentScalar.from_series(series, entry.absprec))
    return ScalarMatrix.from_sparse((target + 1) * r, (window + 1) * r, values, precision)


def _unit_columns(rows: int, indices: Sequence[int], precision: int) -> list[tuple[LaurentScalar, ...]]:
    zero = LaurentScalar.zero()
    one = LaurentScalar.one(precision)
    return [tuple(one if i == k else zero for i in range(rows)) for k in indices]


def enlarged_window(window: int, precision: int, growth: int) -> int:
    """The x-degree window whose image must contain ``V_window`` up to precision.

    A preimage of ``x^D`` under ``d/dx + A`` gains about ``growth + 1`` in x-degree for every
    power of ``t`` it resolves.
    """
    return window + (precision + 1) * (growth + 1)


def _dr_dims(m: ConnectionModule, window: int, precision: int) -> tuple[int, int, bool]:
    small = connection_matrix(m, window, precision)
    small_report = rank_report(small)
    big = connection_matrix(m, enlarged_window(window, precision, m.growth), precision)
    targets = _unit_columns(big.rows, range((window + 1) * m.rank), precision)
    h1, big_report = relative_rank(big, targets)
    return small_report.kernel_dim, h1, small_report.reliable and big_report.reliable


def stabilize(
    compute: Callable[[int], tuple[tuple[int, ...], bool]], start: int, cap: int, what: str
) -> tuple[int, tuple[int, ...], bool, list[list[int]]]:
    """Double the window from ``start`` until two successive windows give the same dimensions.

    Returns:
        The final window, its dimensions, the reliability flag and the trajectory.

    Raises:
        NoStabilization: If the dimensions are still moving past ``cap``.
    """
    window = start
    previous: Optional[tuple[int, ...]] = None
    trajectory: list[list[int]] = []
    reliable = True
    while window <= cap:
        dims, ok = compute(window)
        reliable = reliable and ok
        trajectory.append([window, *dims])
        logger.debug("%s at window %d: %s", what, window, dims)
        if dims == previous:
            return window, dims, reliable, trajectory
        previous = dims
        window *= 2
    raise NoStabilization(
        f"{what} did not stabilize below x-degree {cap}", [(row[0], tuple(row[1:])) for row in trajectory]
    )


def dr_cohomology(
    m: ConnectionModule,
    degree_window: Optional[int] = None,
    t_precision: Optional[int] = None,
    x_deg_max: Optional[int] = None,
) -> DrReport:
    """``(h0, h1)`` of ``d/dx + A`` on the disc.

    Args:
        m: The connection.
        degree_window: The first x-degree window.
        t_precision: The working relative precision.
        x_deg_max: The x-degree window cap.

    Raises:
        NoStabilization: If the dimensions are still moving at the cap.
    """
    if m.rank < 1:
        raise ValueError("connection of rank zero")
    precision = t_precision or app_settings.precision.T_PRECISION
    start = degree_window or app_settings.window.X_DEG_START
    cap = x_deg_max or app_settings.window.X_DEG_MAX

    def compute(window: int):
        h0, h1, reliable = _dr_dims(m, window, precision)
        return (h0, h1), reliable

    window, (h0, h1), reliable, trajectory = stabilize(compute, start, cap, "de Rham cohomology")
    return DrReport(
        h0=h0,
        h1=h1,
        euler_characteristic=h0 - h1,
        t_precision=precision,
        degree_window=window,
        stabilized=True,
        reliable=reliable,
        trajectory=trajectory,
    )


def kernel_vectors(m: ConnectionModule, window: int, precision: int) -> list[tuple[LaurentScalar, ...]]:
    """Approximate horizontal sections in ``V_window``."""
    return kernel_basis(connection_matrix(m, window, precision))


def spectral_radius_estimate(m: ConnectionModule, k_max: int) -> SpectralEstimate:
    """Bracket the spectral radius of the connection from the iterates ``G_k`` of ``nabla^k`` on the basis.

    ``G_0 = I`` and ``G_(k+1) = G_k' + A G_k``.  Since ``|nabla^k| <= max_(i<=k) |G_i|``, the
    valuation of the spectral radius is at least ``max_k min_(i<=k) v(G_i) / k``; the estimate
    ``min(0, v(G_kmax) / kmax)`` bounds it from above.
    """
    if k_max < 1:
        raise ValueError("k_max must be positive")
    r = m.rank
    zero = TateElement.zero(1)
    identity_precision = max([e.precision for row in m.matrix for e in row if not e.is_zero] + [1])
    current = [
        [TateElement.one(1, identity_precision) if i == j else zero for j in range(r)] for i in range(r)
    ]
    valuations: list[Optional[int]] = [0]
    for _ in range(k_max):
        nxt = []
        for i in range(r):
            row = []
            for j in range(r):
                acc = current[i][j].derivative(1)
                for k in range(r):
                    acc = acc + m.matrix[i][k] * current[k][j]
                row.append(acc)
            nxt.append(row)
        current = nxt
        entries = [e for row in current for e in row if not e.is_zero]
        valuations.append(min(e.scale for e in entries) if entries else None)

    lower: Optional[Fraction] = None
    running = 0
    for k in range(1, k_max + 1):
        if valuations[k] is not None:
            running = min(running, valuations[k])
        bound = Fraction(running, k)
        lower = bound if lower is None else max(lower, bound)
    last = valuations[k_max]
    upper = Fraction(0) if last is None else min(Fraction(0), Fraction(last, k_max))

    if m.is_integral():
        verdict = ModelVerdict.MODEL_CERTIFIED
    elif all(v is not None and v < 0 for v in valuations[(k_max + 1) // 2 :]) and last is not None and last < 0:
        verdict = ModelVerdict.NO_MODEL
    else:
        verdict = ModelVerdict.INCONCLUSIVE
    logger.debug("spectral radius bracket [%s, %s]: %s", lower, upper, verdict.value)
    return SpectralEstimate(lower=str(lower), upper=str(upper), verdict=verdict, iterate_valuations=valuations)


@dataclass(frozen=True)
class ResidueConnection:
    """The connection ``d/dx + Abar`` on k[x]^r."""

    matrix: tuple[tuple[Poly, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def growth(self) -> int:
        return max([0] + [p.degree() for row in self.matrix for p in row if not p.is_zero])

    def to_sources(self) -> list[list[str]]:
        return [[str(p.as_expr()) for p in row] for row in self.matrix]


def reduce_model(m: ConnectionModule, k_max: Optional[int] = None) -> ResidueConnection:
    """``Abar = A mod t`` for a connection with a certified integral model.

    Args:
        m: The connection.
        k_max: The number of iterates of the spectral estimate.

    Raises:
        NoModelAvailable: If the spectral estimate does not certify a model.
    """
    verdict = m.spectral(k_max).verdict
    if verdict != ModelVerdict.MODEL_CERTIFIED:
        raise NoModelAvailable(f"no integral model certified ({verdict.value})")
    rows = []
    for row in m.matrix:
        out = []
        for entry in row:
            rep = {mono: sympy.Rational(c.numerator, c.denominator) for mono, c in entry.reduce_mod_t().items()}
            out.append(Poly.from_dict(rep, X, domain=QQ) if rep else Poly(0, X, domain=QQ))
        rows.append(tuple(out))
    return ResidueConnection(tuple(rows))


def _residue_rows(a: ResidueConnection, window: int) -> list[list]:
    r = a.rank
    target = window + a.growth
    dense = [[QQ.zero] * ((window + 1) * r) for _ in range((target + 1) * r)]
    for j in range(window + 1):
        for s in range(r):
            col = j * r + s
            if j:
                dense[(j - 1) * r + s][col] += QQ(j)
            for s2 in range(r):
                for (k,), c in a.matrix[s2][s].as_dict().items():
                    dense[(j + k) * r + s2][col] += QQ.from_sympy(c)
    return dense


def _rank(rows: list[list], cols: int) -> int:
    if not rows or not cols:
        return 0
    return DomainMatrix(rows, (len(rows), cols), QQ).rank()


def _residue_dims(a: ResidueConnection, window: int) -> tuple[int, int]:
    r = a.rank
    small = _residue_rows(a, window)
    cols = (window + 1) * r
    h0 = cols - _rank(small, cols)
    big_window = 2 * window + 1
    big = _residue_rows(a, big_window)
    big_cols = (big_window + 1) * r
    augmented = [row + [QQ.one if i == k else QQ.zero for k in range(cols)] for i, row in enumerate(big)]
    h1 = _rank(augmented, big_cols + cols) - _rank(big, big_cols)
    return h0, h1


def euler_char_residue(
    a: ResidueConnection, degree_window: Optional[int] = None, x_deg_max: Optional[int] = None
) -> ResidueEulerReport:
    """``(h0, h1, chi)`` of ``d/dx + Abar`` on k[x]^r by exact rational elimination.

    Raises:
        NoStabilization: If the dimensions are still moving at the cap.
    """
    start = degree_window or app_settings.window.X_DEG_START
    cap = x_deg_max or app_settings.window.X_DEG_MAX
    window, (h0, h1), _, _ = stabilize(
        lambda w: (_residue_dims(a, w), True), start, cap, "residue de Rham cohomology"
    )
    return ResidueEulerReport(h0=h0, h1=h1, chi=h0 - h1, degree_window=window, stabilized=True)


def verify_chi_transfer(
    m: ConnectionModule,
    t_precision: Optional[int] = None,
    x_deg_max: Optional[int] = None,
    degree_window: Optional[int] = None,
    k_max: Optional[int] = None,
) -> ChiTransferReport:
    """Compare the Euler characteristic over the Tate algebra with that of the reduction.

    Args:
        m: The connection.
        t_precision: The working relative precision.
        x_deg_max: The x-degree window cap of both sides.
        degree_window: The first x-degree window of both sides.
        k_max: The number of iterates of the spectral estimate certifying the model.

    Raises:
        NoModelAvailable: If no integral model is certified.
        NoStabilization: If either side does not stabilize.
    """
    residue_connection = reduce_model(m, k_max)
    tate = dr_cohomology(m, degree_window, t_precision, x_deg_max)
    residue = euler_char_residue(residue_connection, degree_window, x_deg_max)
    return ChiTransferReport(
        chi_tate=tate.euler_characteristic,
        chi_residue=residue.chi,
        residue_matrix=residue_connection.to_sources(),
        tate=tate,
        residue=residue,
        agree=tate.euler_characteristic == residue.chi,
    )


def hat_invariance_check(
    m: CyclicModule,
    t_precision: Optional[int] = None,
    x_deg_max: Optional[int] = None,
    degree_window: Optional[int] = None,
) -> HatInvarianceReport:
    """Compare the de Rham cohomology of ``D/DP`` with the completed route.

    When ``P`` is a unit of the completed Weyl algebra the completed module vanishes, so both
    cohomology groups must vanish.

    Raises:
        InconclusiveRoute: If ``P`` is neither a certified unit nor convertible to a connection.
    """
    direct: Optional[DrReport] = None
    try:
        direct = dr_cohomology(cyclic_to_connection(m), degree_window, t_precision, x_deg_max)
    except (LeadingCoefficientNotUnit, UnsupportedPresentation) as err:
        logger.info("direct route unavailable: %s", err)
    completed_is_zero: Optional[bool] = None
    unit_inverse: Optional[str] = None
    try:
        unit_inverse = invert_unit(m.relation).to_source()
        completed_is_zero = True
    except NotAUnit as err:
        logger.info("completed route unavailable: %s", err)
    if direct is None and completed_is_zero is None:
        raise InconclusiveRoute(f"{m.relation.to_source()} is neither a unit nor a companion-form relation")
    agree = True
    if direct is not None and completed_is_zero:
        agree = direct.h0 == 0 and direct.h1 == 0
    return HatInvarianceReport(
        relation=m.relation.to_source(),
        direct=direct,
        completed_is_zero=completed_is_zero,
        unit_inverse=unit_inverse,
        agree=agree,
    )

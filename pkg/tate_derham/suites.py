"""Verification suites run by ``tate-dr verify``.

Each suite is a function of a :class:`VerifyContext` returning a :class:`SuiteReport`; a failed
check, including one that raised a mathematical failure, is reported in the payload.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Any, Callable, Optional

from tate_derham.algebra.scalars import LaurentScalar
from tate_derham.algebra.tate import TateElement
from tate_derham.algebra.weyl import WeylOperator, apply, invert_unit, multiply, transpose
from tate_derham.directimage import (
    EmbeddingData,
    chain_map_verify,
    dr_shift_check,
    homotopy_verify,
    push_forward_presentation,
    transport_filtration_dim,
)
from tate_derham.dmodule import (
    ConnectionModule,
    CyclicModule,
    cyclic_to_connection,
    dr_cohomology,
    hat_invariance_check,
    verify_chi_transfer,
)
from tate_derham.errors import TateDRError
from tate_derham.groebner import FilteredPresentation, is_holonomic
from tate_derham.linalg import ScalarMatrix, kernel_basis, rank_report
from tate_derham.models import CheckResult, SuiteReport
from tate_derham.models.types import VerifySuite
from tate_derham.modules import ConnectionModel, PushforwardModel, StructureSheafModel, TruncatedComplex
from tate_derham.parser import parse_weyl
from tate_derham.settings import Settings, app_settings, get_runner_instance
from tate_derham.spencer import build_spencer, compositions_vanish, hom_spencer_equals_dr, resolution_check_truncated

logger = logging.getLogger(__name__)

LAMBDA_FAMILY = {"0": (1, 0), "t": (1, 0), "t^2": (1, 0), "1": (0, 0), "t^-1": (0, 0)}
"""Relations ``d1 - lambda`` and the expected ``(h0, h1)``."""


@dataclass(frozen=True)
class VerifyContext:
    """The knobs shared by all suites."""

    precision: int
    x_deg_start: int
    x_deg_max: int
    tail: int
    spectral_k_max: int
    seed: int
    cases: int

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "VerifyContext":
        settings = settings or app_settings
        return cls(
            precision=settings.precision.T_PRECISION,
            x_deg_start=settings.window.X_DEG_START,
            x_deg_max=settings.window.X_DEG_MAX,
            tail=settings.window.TAIL,
            spectral_k_max=settings.window.SPECTRAL_K_MAX,
            seed=settings.verify.SEED,
            cases=settings.verify.CASES,
        )

    def weyl(self, src: str, var_count: int = 1, precision: Optional[int] = None) -> WeylOperator:
        return parse_weyl(src, var_count, precision or self.precision)

    def connection(self, src: str) -> ConnectionModule:
        """The connection ``d/dx + A`` with ``A = (src)`` of rank one."""
        return ConnectionModule.scalar(self.weyl(src).coefficient((0,)))


def guarded(name: str, statement: str, check: Callable[[], tuple[bool, Any]]) -> CheckResult:
    """Run ``check`` and turn a raised failure into a failed check."""
    try:
        passed, detail = check()
    except TateDRError as err:
        logger.warning("check %s raised %s: %s", name, type(err).__name__, err)
        return CheckResult(name=name, statement=statement, passed=False, detail={"error": str(err)})
    logger.debug("check %s: %s", name, "passed" if passed else "failed")
    return CheckResult(name=name, statement=statement, passed=bool(passed), detail=detail)


def suite_report(suite: VerifySuite, checks: list[CheckResult]) -> SuiteReport:
    return SuiteReport(suite=suite.value, passed=all(c.passed for c in checks), checks=checks)


def random_series(rng: random.Random, low: int, high: int) -> dict[int, Fraction]:
    exponents = rng.sample(range(low, high + 1), rng.randint(1, min(2, high - low + 1)))
    return {e: Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2])) for e in exponents}


def random_tate(rng: random.Random, var_count: int, precision: int) -> TateElement:
    """A nonzero element with 1-3 terms of x-degree at most 2, known to relative precision ``precision``."""
    shift = rng.randint(-1, 1)
    terms = {}
    for _ in range(rng.randint(1, 3)):
        mono = tuple(rng.randint(0, 2) for _ in range(var_count))
        terms[mono] = random_series(rng, shift, shift + 2)
    leading = next(iter(terms))
    terms[leading] = {**terms[leading], shift: Fraction(1)}
    return TateElement.build(var_count, terms, shift + precision)


def random_weyl(rng: random.Random, var_count: int, precision: int) -> WeylOperator:
    """A nonzero operator of order at most 2 with coefficients from :func:`random_tate`."""
    terms: dict[tuple[int, ...], TateElement] = {}
    absprec = None
    for _ in range(rng.randint(1, 3)):
        alpha = tuple(rng.randint(0, 1) for _ in range(var_count))
        f = random_tate(rng, var_count, precision)
        absprec = f.absprec if absprec is None else min(absprec, f.absprec)
        terms[alpha] = terms[alpha] + f if alpha in terms else f
    p = WeylOperator.build(var_count, terms, absprec)
    return p if not p.is_zero else WeylOperator.one(var_count, precision)


def random_matrix(rng: random.Random, precision: int) -> ScalarMatrix:
    rows, cols = rng.randint(1, 5), rng.randint(1, 5)
    values = {}
    for i in range(rows):
        for j in range(cols):
            if rng.random() < 0.6:
                values[(i, j)] = LaurentScalar.from_fraction(rng.randint(-3, 3) or 1, precision, rng.randint(-1, 2))
    if rng.random() < 0.3 and rows > 1:
        for j in range(cols):
            if (0, j) in values:
                values[(rows - 1, j)] = values[(0, j)]
            else:
                values.pop((rows - 1, j), None)
    return ScalarMatrix.from_sparse(rows, cols, values, precision)


def _property(ctx: VerifyContext, salt: int, case: Callable[[random.Random], bool]) -> tuple[bool, dict]:
    rng = random.Random(ctx.seed + salt)
    failures = []
    for i in range(ctx.cases):
        if not case(rng):
            failures.append(i)
    return not failures, {"cases": ctx.cases, "failedCases": failures[:10]}


def norms_suite(ctx: VerifyContext) -> SuiteReport:
    p = ctx.precision

    def ultrametric(rng):
        n = rng.randint(1, 2)
        f, g = random_tate(rng, n, p), random_tate(rng, n, p)
        total = f + g
        if f.scale != g.scale:
            return not total.is_zero and total.scale == min(f.scale, g.scale)
        return total.is_zero or total.scale >= f.scale

    def multiplicative(rng):
        n = rng.randint(1, 2)
        f, g = random_tate(rng, n, p), random_tate(rng, n, p)
        return (f * g).gauss_norm() == f.scale + g.scale

    def operator_multiplicative(rng):
        n = rng.randint(1, 2)
        a, b = random_weyl(rng, n, p), random_weyl(rng, n, p)
        return (a * b).operator_norm() == a.norm + b.norm

    def scalar_multiplicative(rng):
        a = LaurentScalar.from_fraction(rng.randint(1, 9), p, rng.randint(-3, 3))
        b = LaurentScalar.from_fraction(-rng.randint(1, 9), p, rng.randint(-3, 3))
        return (a * b).valuation == a.valuation + b.valuation

    def norm_example():
        norm = ctx.weyl("t^-1*d1 + x1").operator_norm()
        return norm == -1, {"norm": str(norm)}

    checks = [
        guarded(
            "ultrametric",
            "|f + g| <= max(|f|, |g|), with equality if |f| != |g|",
            lambda: _property(ctx, 1, ultrametric),
        ),
        guarded("gauss-norm-multiplicative", "|f g| = |f| |g|", lambda: _property(ctx, 2, multiplicative)),
        guarded("operator-norm-multiplicative", "|P Q| = |P| |Q|", lambda: _property(ctx, 3, operator_multiplicative)),
        guarded("valuation-additive", "v(a b) = v(a) + v(b)", lambda: _property(ctx, 4, scalar_multiplicative)),
        guarded("norm-example", "|t^-1 d1 + x1| = |t|^-1", norm_example),
    ]
    return suite_report(VerifySuite.NORMS, checks)


def inversion_suite(ctx: VerifyContext) -> SuiteReport:
    p = ctx.precision

    def geometric():
        inverse = invert_unit(ctx.weyl("1 - t*d1"))
        expected = ctx.weyl(" + ".join(["1"] + [f"t^{k}*d1^{k}" for k in range(1, p)]))
        return inverse.equals(expected), {"inverse": inverse.to_source()}

    def round_trip():
        q = ctx.weyl("1 - t*d1")
        return (multiply(q, invert_unit(q))).equals(WeylOperator.one(1, p)), None

    def tate_unit():
        f = ctx.weyl("1 + t*x1").coefficient((0,))
        return (f * f.invert_unit()).equals(TateElement.one(1, p)), {"inverse": f.invert_unit().to_source()}

    def completed_route():
        relation = CyclicModule(ctx.weyl("1 - t*d1"))
        report = hat_invariance_check(relation, ctx.precision, ctx.x_deg_max, ctx.x_deg_start)
        return report.agree and report.completed_is_zero, report.model_dump(by_alias=True, mode="json")

    checks = [
        guarded("geometric-inverse", "(1 - t d)^-1 = sum_(k<p) t^k d^k", geometric),
        guarded("multiply-back", "(1 - t d) (1 - t d)^-1 = 1 mod t^p", round_trip),
        guarded("tate-unit", "(1 + t x)(1 + t x)^-1 = 1", tate_unit),
        guarded("completed-base-change", "D/D(1 - t d) has vanishing de Rham cohomology", completed_route),
    ]
    return suite_report(VerifySuite.INVERSION, checks)


def properties_suite(ctx: VerifyContext) -> SuiteReport:
    p = ctx.precision

    def involution(rng):
        q = random_weyl(rng, rng.randint(1, 2), p)
        return transpose(transpose(q)).equals(q)

    def anti_homomorphism(rng):
        n = rng.randint(1, 2)
        a, b = random_weyl(rng, n, p), random_weyl(rng, n, p)
        return transpose(a * b).equals(transpose(b) * transpose(a))

    def leibniz(rng):
        n = rng.randint(1, 2)
        f, g = random_tate(rng, n, p), random_tate(rng, n, p)
        i = rng.randint(1, n)
        return (f * g).derivative(i).equals(f.derivative(i) * g + f * g.derivative(i))

    def integrate(rng):
        n = rng.randint(1, 2)
        f = random_tate(rng, n, p)
        i = rng.randint(1, n)
        return f.integrate(i).derivative(i).equals(f)

    def composition(rng):
        n = rng.randint(1, 2)
        a, b, f = random_weyl(rng, n, p), random_weyl(rng, n, p), random_tate(rng, n, p)
        return apply(a * b, f).equals(apply(a, apply(b, f)))

    def rank_nullity(rng):
        m = random_matrix(rng, p)
        report = rank_report(m)
        return report.rank + report.kernel_dim == m.cols and len(kernel_basis(m)) == report.kernel_dim

    def complexes():
        rng = random.Random(ctx.seed + 17)
        built = 0
        for n in (1, 2, 3):
            TruncatedComplex.build(StructureSheafModel(n, p), 3, 0, p)
            built += 1
        for _ in range(max(1, ctx.cases // 20)):
            a = random_tate(rng, 1, p)
            connection = ConnectionModel(ConnectionModule.scalar(a), p)
            TruncatedComplex.build(connection, 4, 0, p)
            TruncatedComplex.build(PushforwardModel(connection, 2), 3, 1, p)
            built += 2
        return True, {"complexes": built}

    checks = [
        guarded("transpose-involution", "(P^t)^t = P", lambda: _property(ctx, 11, involution)),
        guarded("transpose-anti-homomorphism", "(P Q)^t = Q^t P^t", lambda: _property(ctx, 12, anti_homomorphism)),
        guarded("leibniz", "d(f g) = d(f) g + f d(g)", lambda: _property(ctx, 13, leibniz)),
        guarded("derivative-integrate", "d_i (integral_i f) = f", lambda: _property(ctx, 14, integrate)),
        guarded("apply-composition", "(P Q)(f) = P(Q(f))", lambda: _property(ctx, 15, composition)),
        guarded("rank-nullity", "rank + dim ker = cols", lambda: _property(ctx, 16, rank_nullity)),
        guarded("delta-squared", "delta delta = 0 on every built complex", complexes),
    ]
    return suite_report(VerifySuite.PROPERTIES, checks)


def _dims_check(ctx: VerifyContext, name: str, relation: str, expected: tuple[int, int]) -> CheckResult:
    def run():
        report = dr_cohomology(
            cyclic_to_connection(CyclicModule(ctx.weyl(relation))),
            degree_window=ctx.x_deg_start,
            t_precision=ctx.precision,
            x_deg_max=ctx.x_deg_max,
        )
        return (report.h0, report.h1) == expected and report.stabilized, report.model_dump(by_alias=True, mode="json")

    return guarded(name, f"(h0, h1) of D/D({relation}) = {expected}", run)


def dr_disc_suite(ctx: VerifyContext) -> SuiteReport:
    checks = [
        _dims_check(ctx, "structure-sheaf", "d1", (1, 0)),
        _dims_check(ctx, "no-model-vanishing", "d1 - t^-1", (0, 0)),
        _dims_check(ctx, "rescaled-relation", "1 - t*d1", (0, 0)),
    ]
    return suite_report(VerifySuite.DR_DISC, checks)


def lambda_family_suite(ctx: VerifyContext) -> SuiteReport:
    checks = [
        _dims_check(ctx, f"lambda={lam}", "d1" if lam == "0" else f"d1 - {lam}", expected)
        for lam, expected in LAMBDA_FAMILY.items()
    ]
    return suite_report(VerifySuite.LAMBDA_FAMILY, checks)


def holonomicity_suite(ctx: VerifyContext) -> SuiteReport:
    def char(relations: list[str], n: int):
        return is_holonomic(FilteredPresentation.cyclic(n, [ctx.weyl(r, n) for r in relations]))

    def pushed_structure():
        report = char(["d1", "x2"], 2)
        return report.holonomic and report.char_dimension == 2, report.model_dump(by_alias=True, mode="json")

    def non_holonomic():
        report = char(["1 - t*d1"], 2)
        return not report.holonomic and report.char_dimension == 3, report.model_dump(by_alias=True, mode="json")

    def zero_module():
        report = char(["x1", "d1"], 1)
        return report.zero_module and report.char_dimension == -1, report.model_dump(by_alias=True, mode="json")

    def principal_symbol():
        report = char(["x1*d1 - 1"], 1)
        return bool(report.principal_symbol_agrees) and report.holonomic, report.model_dump(by_alias=True, mode="json")

    checks = [
        guarded("pushforward-of-structure-sheaf", "D2/(D2 d1 + D2 x2) is holonomic of dimension 2", pushed_structure),
        guarded("completed-unit-relation", "D2/D2(1 - t d1) has dimension 3", non_holonomic),
        guarded("unit-ideal", "D1/(x1, d1) = 0", zero_module),
        guarded("principal-symbol", "in(D P) = (sigma(P)) for a single relation", principal_symbol),
    ]
    return suite_report(VerifySuite.HOLONOMICITY, checks)


CORPUS = {"structure-sheaf": "0", "no-model": "-t^-1", "small-constant": "-t"}
"""Rank-one connections ``d/dx + A`` on the disc, by name."""


def direct_image_suite(ctx: VerifyContext) -> SuiteReport:
    e = EmbeddingData(1, 2)

    def shift(src: str):
        def run():
            report = dr_shift_check(ctx.connection(src), e, ctx.x_deg_start, ctx.precision, ctx.x_deg_max, ctx.tail)
            return report.equal, report.model_dump(by_alias=True, mode="json")

        return run

    def chain(src: str):
        def run():
            report = chain_map_verify(ctx.connection(src), e, ctx.x_deg_start, ctx.precision)
            return report.commutes and report.injective, report.model_dump(by_alias=True, mode="json")

        return run

    def presentation():
        once = push_forward_presentation([ctx.weyl("d1")], EmbeddingData(1, 3), ctx.precision)
        first = push_forward_presentation([ctx.weyl("d1")], e, ctx.precision)
        twice = push_forward_presentation(first, EmbeddingData(2, 3), ctx.precision)
        sources = (sorted(once.to_sources()[0]), sorted(twice.to_sources()[0]))
        return sources[0] == sources[1], {"once": sources[0], "twice": sources[1]}

    def holonomic_preserved():
        pushed = push_forward_presentation([ctx.weyl("d1")], e, ctx.precision)
        report = is_holonomic(pushed)
        expected = transport_filtration_dim(1, e)
        return report.holonomic and report.char_dimension == expected, {"charDimension": report.char_dimension}

    checks = [guarded(f"shift-{name}", "H^i(B1, M) = H^(i+1)(B2, i+M)", shift(src)) for name, src in CORPUS.items()]
    checks += [guarded(f"chain-map-{name}", "f delta = delta f", chain(src)) for name, src in CORPUS.items()]
    checks.append(guarded("composition", "pushing forward twice = pushing forward once", presentation))
    checks.append(guarded("holonomic-preserved", "i+ of a holonomic module is holonomic", holonomic_preserved))
    return suite_report(VerifySuite.DIRECT_IMAGE, checks)


def homotopy_suite(ctx: VerifyContext) -> SuiteReport:
    e = EmbeddingData(1, 2)
    precision = min(ctx.precision, 6)

    def run(src: str):
        connection = ConnectionModule.scalar(ctx.weyl(src, precision=precision).coefficient((0,)))
        report = homotopy_verify(connection, e, 6, precision, ctx.tail)
        return report.holds, report.model_dump(by_alias=True, mode="json")

    checks = [
        guarded(f"homotopy-{name}", "delta h + h delta = Id on the cokernel of f", partial(run, src))
        for name, src in CORPUS.items()
    ]
    return suite_report(VerifySuite.HOMOTOPY, checks)


def spencer_suite(ctx: VerifyContext) -> SuiteReport:
    p = ctx.precision
    window = min(ctx.x_deg_start, 4)

    def compositions():
        return all(compositions_vanish(build_spencer(n, p)) for n in (1, 2, 3)), None

    def hom_equals_dr(model):
        def run():
            report = hom_spencer_equals_dr(model, window)
            return report.equal and report.compositions_zero, report.model_dump(by_alias=True, mode="json")

        return run

    def resolution(n: int):
        def run():
            report = resolution_check_truncated(n, max(window, n), p)
            return report.exact and report.augmentation_surjective, report.model_dump(by_alias=True, mode="json")

        return run

    checks = [
        guarded("compositions-vanish", "d d = 0 in D_n for n = 1, 2, 3", compositions),
        guarded("hom-equals-dr-n1", "Hom(Sp, O) = DR(O) on the disc", hom_equals_dr(StructureSheafModel(1, p))),
        guarded("hom-equals-dr-n2", "Hom(Sp, O) = DR(O) on the 2-polydisc", hom_equals_dr(StructureSheafModel(2, p))),
        guarded(
            "hom-equals-dr-connection",
            "Hom(Sp, M) = DR(M) for D/D(d1 - t^-1)",
            hom_equals_dr(ConnectionModel(ctx.connection("-t^-1"), p)),
        ),
        guarded("resolution-n1", "Sp -> O -> 0 is exact for n = 1", resolution(1)),
        guarded("resolution-n2", "Sp -> O -> 0 is exact for n = 2", resolution(2)),
    ]
    return suite_report(VerifySuite.SPENCER, checks)


def chi_transfer_suite(ctx: VerifyContext) -> SuiteReport:
    def run(src: str, expected: int):
        def check():
            report = verify_chi_transfer(
                ctx.connection(src), ctx.precision, ctx.x_deg_max, ctx.x_deg_start, ctx.spectral_k_max
            )
            passed = report.agree and report.chi_tate == expected
            return passed, report.model_dump(by_alias=True, mode="json")

        return check

    checks = [
        guarded("zero-connection", "chi over K = chi over k for A = 0", run("0", 1)),
        guarded("linear-connection", "chi over K = chi over k = -1 for A = -x", run("-x1", -1)),
        guarded("small-constant", "chi over K = chi over k = 1 for A = -t", run("-t", 1)),
        guarded("small-linear", "chi over K = chi over k = 1 for A = t x", run("t*x1", 1)),
    ]
    return suite_report(VerifySuite.CHI_TRANSFER, checks)


SUITES: dict[VerifySuite, Callable[[VerifyContext], SuiteReport]] = {
    VerifySuite.NORMS: norms_suite,
    VerifySuite.INVERSION: inversion_suite,
    VerifySuite.PROPERTIES: properties_suite,
    VerifySuite.DR_DISC: dr_disc_suite,
    VerifySuite.LAMBDA_FAMILY: lambda_family_suite,
    VerifySuite.HOLONOMICITY: holonomicity_suite,
    VerifySuite.DIRECT_IMAGE: direct_image_suite,
    VerifySuite.HOMOTOPY: homotopy_suite,
    VerifySuite.SPENCER: spencer_suite,
    VerifySuite.CHI_TRANSFER: chi_transfer_suite,
}


def verify_suites(selector: VerifySuite, settings: Optional[Settings] = None) -> list[SuiteReport]:
    """Run the selected suite, or every suite for ``all``, through the configured runner."""
    settings = settings or app_settings
    ctx = VerifyContext.from_settings(settings)
    selected = list(SUITES) if selector == VerifySuite.ALL else [selector]
    runner = get_runner_instance(settings)
    return runner.run([partial(SUITES[suite], ctx) for suite in selected])

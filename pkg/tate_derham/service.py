"""Module implementing the service layer of the command-line interface."""

import logging
from pathlib import Path
from typing import Optional, Union

from tate_derham.algebra.scalars import PrecisionBound
from tate_derham.algebra.weyl import WeylOperator, apply, invert_unit, multiply, symbol, transpose
from tate_derham.directimage import (
    EmbeddingData,
    chain_map_verify,
    dr_shift_check,
    homotopy_verify,
    model_cohomology,
    model_for,
    push_forward_presentation,
    side_change,
    transport_filtration_dim,
)
from tate_derham.dmodule import (
    ConnectionModule,
    CyclicModule,
    cyclic_to_connection,
    dr_cohomology,
    hat_invariance_check,
    spectral_radius_estimate,
    verify_chi_transfer,
)
from tate_derham.errors import IndexOutOfRange, UsageFailure
from tate_derham.groebner import FilteredPresentation, is_holonomic
from tate_derham.models import SuiteReport
from tate_derham.models.types import DirectImageCheck, VerifySuite
from tate_derham.parser import parse_tate, parse_weyl
from tate_derham.settings import Settings, app_settings
from tate_derham.suites import verify_suites

logger = logging.getLogger(__name__)


def _log_norm(value: Union[int, PrecisionBound]) -> Union[int, str]:
    return str(value) if isinstance(value, PrecisionBound) else value


def read_matrix(path: Path, precision: int) -> ConnectionModule:
    """Read a connection matrix, one row per line (or separated by ``;``), entries separated by ``,``.

    Raises:
        UsageFailure: If the rows are empty or of unequal length.
    """
    text = path.read_text().replace(";", "\n")
    rows = [[entry.strip() for entry in line.split(",")] for line in text.splitlines() if line.strip()]
    if not rows or any(len(row) != len(rows) for row in rows):
        raise UsageFailure(f"{path} does not hold a square matrix")
    return ConnectionModule(tuple(tuple(parse_tate(entry, 1, precision) for entry in row) for row in rows))


class DRService:
    """Service class implementing the business logic behind every subcommand.

    Args:
        settings: The settings of the invocation, the application settings by default.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or app_settings

    @property
    def precision(self) -> int:
        return self.settings.precision.T_PRECISION

    @property
    def x_deg_start(self) -> int:
        return self.settings.window.X_DEG_START

    @property
    def x_deg_max(self) -> int:
        return self.settings.window.X_DEG_MAX

    @property
    def tail(self) -> int:
        return self.settings.window.TAIL

    @property
    def k_max(self) -> int:
        return self.settings.window.SPECTRAL_K_MAX

    def parse(self, src: str, var_count: int) -> WeylOperator:
        return parse_weyl(src, var_count, self.precision)

    def evaluate(self, src: str, var_count: int) -> dict:
        """The normal form of an operator expression."""
        p = self.parse(src, var_count)
        return {
            "normalForm": p.to_source(),
            "order": p.order,
            "operator": p.to_json(),
            "symbol": symbol(p).to_source() if not p.is_zero else None,
        }

    def norm(self, src: str, var_count: int) -> dict:
        """The operator norm, as a log-norm, of an operator expression."""
        p = self.parse(src, var_count)
        return {"operator": p.to_source(), "logNorm": _log_norm(p.operator_norm())}

    def transpose(self, src: str, var_count: int) -> dict:
        p = self.parse(src, var_count)
        q = transpose(p)
        return {"operator": p.to_source(), "transpose": q.to_source(), "result": q.to_json()}

    def invert(self, src: str, var_count: int) -> dict:
        """The inverse of a unit of the completed Weyl algebra.

        Raises:
            NotAUnit: If the operator is not a scalar plus a contraction.
        """
        p = self.parse(src, var_count)
        inverse = invert_unit(p)
        return {
            "operator": p.to_source(),
            "inverse": inverse.to_source(),
            "result": inverse.to_json(),
            "multipliesBack": multiply(p, inverse).equals(WeylOperator.one(var_count, self.precision)),
        }

    def apply(self, operator: str, function: str, var_count: int) -> dict:
        p = self.parse(operator, var_count)
        f = parse_tate(function, var_count, self.precision)
        g = apply(p, f)
        return {"operator": p.to_source(), "function": f.to_source(), "image": g.to_source(), "result": g.to_json()}

    def _connection(self, relations: list[str], matrix: Optional[Path]) -> ConnectionModule:
        if matrix is not None:
            return read_matrix(matrix, self.precision)
        if len(relations) != 1:
            raise UsageFailure("a connection on the disc is given by exactly one relation")
        return cyclic_to_connection(CyclicModule(self.parse(relations[0], 1)))

    def dr(
        self,
        relations: list[str],
        var_count: int = 1,
        matrix: Optional[Path] = None,
        spectral: bool = False,
        chi: bool = False,
        hat: bool = False,
    ) -> dict:
        """De Rham cohomology of a connection on the disc or of a recognized presentation.

        Args:
            relations: The relations of a cyclic module.
            var_count: The number of variables of the relations.
            matrix: A file holding a connection matrix, instead of relations.
            spectral: Whether to add the spectral-radius estimate of the connection.
            chi: Whether to compare the Euler characteristic with that of the reduction.
            hat: Whether to compare with the completed route.

        Raises:
            UsageFailure: If neither or both of ``relations`` and ``matrix`` are given.
        """
        if bool(relations) == (matrix is not None):
            raise UsageFailure("give either relations or a connection matrix")
        if var_count > 1:
            if matrix is not None or spectral or chi or hat:
                raise UsageFailure("matrices, spectral, chi and hat checks are available on the disc only")
            presentation = FilteredPresentation.cyclic(var_count, [self.parse(r, var_count) for r in relations])
            model = model_for(presentation, self.precision)
            window, dims, reliable, trajectory = model_cohomology(model, self.x_deg_start, self.x_deg_max, self.tail)
            return {
                "dims": list(dims),
                "eulerCharacteristic": sum((-1) ** i * h for i, h in enumerate(dims)),
                "tPrecision": self.precision,
                "degreeWindow": window,
                "stabilized": True,
                "reliable": reliable,
                "trajectory": trajectory,
            }
        connection = self._connection(relations, matrix)
        report = dr_cohomology(connection, self.x_deg_start, self.precision, self.x_deg_max)
        result = {"connection": connection.to_sources(), "dr": report.model_dump(by_alias=True, mode="json")}
        if spectral:
            estimate = spectral_radius_estimate(connection, self.k_max)
            result["spectral"] = estimate.model_dump(by_alias=True, mode="json")
        if chi:
            transfer = verify_chi_transfer(connection, self.precision, self.x_deg_max, self.x_deg_start, self.k_max)
            result["chiTransfer"] = transfer.model_dump(by_alias=True, mode="json")
        if hat:
            if matrix is not None:
                raise UsageFailure("the completed route needs a relation")
            relation = CyclicModule(self.parse(relations[0], 1))
            check = hat_invariance_check(relation, self.precision, self.x_deg_max, self.x_deg_start)
            result["hatInvariance"] = check.model_dump(by_alias=True, mode="json")
        return result

    def holonomic(self, relations: list[str], var_count: int) -> dict:
        """The characteristic variety report of ``D_n / D_n (relations)``."""
        if not relations:
            raise UsageFailure("at least one relation is required")
        presentation = FilteredPresentation.cyclic(var_count, [self.parse(r, var_count) for r in relations])
        return is_holonomic(presentation).model_dump(by_alias=True, mode="json")

    def char_dim(self, relations: list[str], var_count: int) -> dict:
        report = self.holonomic(relations, var_count)
        return {"varCount": var_count, "charDimension": report["charDimension"]}

    def direct_image(
        self, relations: list[str], var_count: int, ambient_dim: int, check: Optional[DirectImageCheck] = None
    ) -> dict:
        """The direct image of ``D_r / D_r (relations)`` along ``{x_(r+1) = ... = x_n = 0}``.

        Args:
            relations: The relations of the source module.
            var_count: The dimension ``r`` of the source polydisc.
            ambient_dim: The dimension ``n`` of the ambient polydisc.
            check: The chain-level check to run on the direct image.
        """
        if not relations:
            raise UsageFailure("at least one relation is required")
        if ambient_dim <= var_count:
            raise IndexOutOfRange(f"ambient dimension {ambient_dim} must exceed the source dimension {var_count}")
        e = EmbeddingData(var_count, ambient_dim)
        source = FilteredPresentation.cyclic(var_count, [self.parse(r, var_count) for r in relations])
        pushed = push_forward_presentation(source, e, self.precision)
        source_report = is_holonomic(source)
        result = {
            "presentation": pushed.to_sources(),
            "rightPresentation": [[p.to_source() for p in side_change(c)] for c in pushed.components],
            "sourceCharDimension": source_report.char_dimension,
        }
        if not source_report.zero_module:
            result["charDimension"] = transport_filtration_dim(source_report.char_dimension, e)
        if check == DirectImageCheck.SHIFT:
            report = dr_shift_check(source, e, self.x_deg_start, self.precision, self.x_deg_max, self.tail)
        elif check == DirectImageCheck.CHAINMAP:
            report = chain_map_verify(source, e, self.x_deg_start, self.precision)
        elif check == DirectImageCheck.HOMOTOPY:
            report = homotopy_verify(source, e, self.x_deg_start, self.precision, self.tail)
        else:
            return result
        result[check.value] = report.model_dump(by_alias=True, mode="json")
        return result

    def verify(self, selector: VerifySuite) -> tuple[bool, list[SuiteReport]]:
        """Run verification suites.

        Returns:
            Whether every suite passed, and the suite reports.
        """
        reports = verify_suites(selector, self.settings)
        logger.info("verify %s: %d suites", selector.value, len(reports))
        return all(report.passed for report in reports), reports

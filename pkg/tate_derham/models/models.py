from typing import Any, Optional

from pydantic import BaseModel
from pydantic.fields import Field

from tate_derham.models.types import ErrorType, ModelVerdict


class BaseReportModel(BaseModel):
    """Base class for report models."""

    model_config = {
        "populate_by_name": True,
    }


class RankReport(BaseReportModel):
    """Outcome of an elimination."""

    rows: int = Field(description="The number of rows of the matrix.")
    cols: int = Field(description="The number of columns of the matrix.")
    rank: int = Field(description="The rank at the working precision.")
    kernel_dim: int = Field(alias="kernelDim", description="cols - rank.")
    cokernel_dim: int = Field(alias="cokernelDim", description="rows - rank.")
    min_pivot_valuation: Optional[int] = Field(
        default=None, alias="minPivotValuation", description="The valuation of the smallest-norm pivot."
    )
    reliable: bool = Field(
        default=True, description="False when a zero decision rested on digits beyond the known precision."
    )


class DrReport(BaseReportModel):
    """De Rham cohomology of a connection on the disc."""

    h0: int = Field(description="The dimension of the kernel of the connection.")
    h1: int = Field(description="The dimension of the cokernel of the connection.")
    euler_characteristic: int = Field(alias="eulerCharacteristic", description="h0 - h1.")
    t_precision: int = Field(alias="tPrecision", description="The relative t-adic precision.")
    degree_window: int = Field(alias="degreeWindow", description="The x-degree window of the reported dimensions.")
    stabilized: bool = Field(description="Whether two successive windows agreed.")
    reliable: bool = Field(description="Whether every rank decision was reliable.")
    trajectory: list[list[int]] = Field(
        default=[], description="The [window, h0, h1] triples observed while doubling the window."
    )


class CharVarietyReport(BaseReportModel):
    """Characteristic variety of a finitely presented module."""

    var_count: int = Field(alias="varCount", description="The number of variables.")
    initial_ideal_generators: list[list[str]] = Field(
        alias="initialIdealGenerators", description="Generators of the initial ideal, per cyclic component."
    )
    groebner_basis: list[list[str]] = Field(alias="groebnerBasis", description="The reduced basis, per component.")
    char_dimension: int = Field(
        alias="charDimension", description="The Krull dimension of the characteristic variety, -1 for zero."
    )
    holonomic: bool = Field(description="Whether the module is zero or of minimal dimension.")
    zero_module: bool = Field(default=False, alias="zeroModule", description="Whether the module is zero.")
    bernstein_bound_ok: bool = Field(
        default=True, alias="bernsteinBoundOk", description="Whether charDimension >= varCount for nonzero modules."
    )
    principal_symbol_agrees: Optional[bool] = Field(
        default=None,
        alias="principalSymbolAgrees",
        description="For principal components, whether the initial ideal is generated by the symbol.",
    )


class SpectralEstimate(BaseReportModel):
    """Estimate of the spectral radius of a connection, in log-norm units."""

    lower: str = Field(description="Certified lower bound on the valuation of the spectral radius.")
    upper: str = Field(description="Estimated upper bound on the valuation of the spectral radius.")
    verdict: ModelVerdict = Field(description="The verdict on the existence of an integral model.")
    iterate_valuations: list[Optional[int]] = Field(
        alias="iterateValuations", description="The valuations of the iterates, None for zero iterates."
    )


class ResidueEulerReport(BaseReportModel):
    """De Rham dimensions of a connection over the residue field."""

    h0: int = Field(description="The dimension of the kernel.")
    h1: int = Field(description="The dimension of the cokernel.")
    chi: int = Field(description="h0 - h1.")
    degree_window: int = Field(alias="degreeWindow", description="The degree window of the reported dimensions.")
    stabilized: bool = Field(description="Whether two successive windows agreed.")


class ChiTransferReport(BaseReportModel):
    """Comparison of Euler characteristics over K and over the residue field."""

    chi_tate: int = Field(alias="chiTate", description="The Euler characteristic over the Tate algebra.")
    chi_residue: int = Field(alias="chiResidue", description="The Euler characteristic of the reduction.")
    residue_matrix: list[list[str]] = Field(alias="residueMatrix", description="The reduced connection matrix.")
    tate: DrReport = Field(description="The de Rham report over the Tate algebra.")
    residue: ResidueEulerReport = Field(description="The de Rham report over the residue field.")
    agree: bool = Field(description="Whether the two Euler characteristics agree.")


class HatInvarianceReport(BaseReportModel):
    """Comparison of the direct and the completed routes for a cyclic module."""

    relation: str = Field(description="The relation of the cyclic module.")
    direct: Optional[DrReport] = Field(default=None, description="Dimensions computed from the connection.")
    completed_is_zero: Optional[bool] = Field(
        default=None, alias="completedIsZero", description="True when the relation is a unit of the completion."
    )
    unit_inverse: Optional[str] = Field(default=None, alias="unitInverse", description="The certified inverse.")
    agree: bool = Field(description="Whether the available routes agree.")


class OffendingEntry(BaseReportModel):
    """An entry that should have vanished."""

    degree: int = Field(description="The cohomological degree of the check.")
    row: str = Field(description="The label of the row.")
    column: str = Field(description="The label of the column.")
    value: str = Field(description="The offending value.")


class ShiftCheckReport(BaseReportModel):
    """Comparison of source and direct-image de Rham dimensions."""

    codimension: int = Field(description="The codimension of the embedding.")
    source_dims: list[int] = Field(alias="sourceDims", description="H^i of the source, i = 0..r.")
    pushforward_dims: list[int] = Field(alias="pushforwardDims", description="H^j of the direct image, j = 0..n.")
    degree_window: int = Field(alias="degreeWindow", description="The x-degree window of the final comparison.")
    stabilized: bool = Field(description="Whether both sides stabilized.")
    reliable: bool = Field(description="Whether every rank decision was reliable.")
    equal: bool = Field(description="Whether H^i of the source equals H^(i+c) of the direct image for all i.")


class ChainMapReport(BaseReportModel):
    """Verification of the wedge-with-eta chain map."""

    commutes: bool = Field(description="Whether f delta = delta f entrywise.")
    injective: bool = Field(description="Whether every f^i has trivial kernel.")
    offending: list[OffendingEntry] = Field(default=[], description="Entries violating the commutation.")


class HomotopyReport(BaseReportModel):
    """Verification of the contracting homotopy on the cokernel complex."""

    holds: bool = Field(description="Whether delta h + h delta = Id entrywise.")
    checked_degrees: list[int] = Field(alias="checkedDegrees", description="The degrees checked.")
    basis_sizes: list[int] = Field(alias="basisSizes", description="The cokernel basis sizes per degree.")
    offending: list[OffendingEntry] = Field(default=[], description="Entries violating the identity.")


class SpencerReport(BaseReportModel):
    """Comparison of Hom(Sp, M) with the de Rham complex of M."""

    n: int = Field(description="The number of variables.")
    ranks: list[int] = Field(description="The ranks of the Spencer terms in degrees -n..0.")
    compositions_zero: bool = Field(alias="compositionsZero", description="Whether d d = 0 holds in the Weyl algebra.")
    equal: bool = Field(description="Whether the Hom matrices equal the de Rham matrices.")
    offending: list[OffendingEntry] = Field(default=[], description="Entries that differ.")


class ResolutionReport(BaseReportModel):
    """Exactness of the augmented Spencer complex on a truncated basis."""

    n: int = Field(description="The number of variables.")
    window: int = Field(description="The weight window.")
    dims: list[int] = Field(description="The dimensions of the truncated terms in degrees -n..0, then O.")
    ranks: list[int] = Field(description="The ranks of the differentials, the augmentation last.")
    homology: list[int] = Field(description="The homology dimensions in degrees -n..0, then O.")
    augmentation_surjective: bool = Field(alias="augmentationSurjective", description="Whether O is hit.")
    exact: bool = Field(description="Whether all homology vanishes.")


class CheckResult(BaseReportModel):
    """A single verification check."""

    name: str = Field(description="The name of the check.")
    statement: str = Field(description="The mathematical statement checked.")
    passed: bool = Field(description="Whether the check passed.")
    detail: Optional[Any] = Field(default=None, description="Supporting data for the check.")


class SuiteReport(BaseReportModel):
    """The outcome of one verification suite."""

    suite: str = Field(description="The name of the suite.")
    passed: bool = Field(description="Whether every check passed.")
    checks: list[CheckResult] = Field(description="The checks of the suite.")


class ErrorSummary(BaseReportModel):
    """A short summary of an error."""

    message: Optional[str] = Field(default=None, description="A human-readable message describing the error.")
    type: ErrorType = Field(description="Characterization of the type of the error.")
    name: str = Field(description="The name of the exception.")


class DegreeWindows(BaseReportModel):
    """The degree windows of a run."""

    start: int = Field(description="The first x-degree window.")
    max: int = Field(description="The x-degree window cap.")


class RunReport(BaseReportModel):
    """The report printed by every subcommand."""

    command: list[str] = Field(description="The command line that produced the report.")
    t_precision: int = Field(alias="tPrecision", description="The relative t-adic precision.")
    degree_windows: DegreeWindows = Field(alias="degreeWindows", description="The degree windows.")
    result: Optional[Any] = Field(default=None, description="The payload of the subcommand.")
    warnings: list[str] = Field(default=[], description="Precision-loss and stabilization warnings.")
    exit_status: int = Field(default=0, alias="exitStatus", description="The exit status of the command.")
    error: Optional[ErrorSummary] = Field(default=None, description="The error, if the command failed.")

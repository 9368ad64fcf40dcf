"""The ``tate-dr`` command-line interface.

Every subcommand prints a :class:`RunReport` as JSON with sorted keys on stdout and exits with
status 0 on success, 1 on a mathematical failure and 2 on a usage error.  Log records go to
stderr; warnings are also collected into the report.
"""

import json
import logging
from pathlib import Path
from typing import Annotated, Any, Callable, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from tate_derham.errors import MathematicalFailure, NoStabilization, TateDRError
from tate_derham.models import DegreeWindows, ErrorSummary, RunReport
from tate_derham.models.types import DirectImageCheck, ErrorType, VerifySuite
from tate_derham.service import DRService
from tate_derham.settings import Settings, app_settings

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="tate-dr",
    help="Differential operators over k((t)) and de Rham cohomology on Tate polydiscs.",
    no_args_is_help=True,
    add_completion=False,
)

Expression = Annotated[str, typer.Argument(help="An operator expression, e.g. '1 - t*d1'.")]
Relations = Annotated[list[str], typer.Argument(help="The relations of the cyclic module.")]
TPrecision = Annotated[Optional[int], typer.Option("--t-prec", min=1, help="Relative t-adic precision.")]
XDegStart = Annotated[Optional[int], typer.Option("--x-deg-start", min=1, help="First x-degree window.")]
XDegMax = Annotated[Optional[int], typer.Option("--x-deg-max", min=1, help="x-degree window cap.")]
Dim = Annotated[int, typer.Option("--dim", min=1, help="Number of variables.")]
Pretty = Annotated[bool, typer.Option("--pretty/--json", help="Indent the JSON report.")]


class WarningCollector(logging.Handler):
    """Keep the messages of warning records for the run report."""

    def __init__(self):
        super().__init__(logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record):
        if record.levelno == logging.WARNING:
            self.messages.append(record.getMessage())


def configure_logging(level: str) -> WarningCollector:
    """Send package log records to stderr through rich and collect warnings."""
    package = logging.getLogger("tate_derham")
    for handler in list(package.handlers):
        package.removeHandler(handler)
    package.setLevel(min(logging.WARNING, logging.getLevelName(level.upper())))
    console_handler = RichHandler(console=Console(stderr=True), show_path=False)
    console_handler.setLevel(level.upper())
    package.addHandler(console_handler)
    collector = WarningCollector()
    package.addHandler(collector)
    return collector


def invocation_settings(
    t_prec: Optional[int] = None, x_deg_start: Optional[int] = None, x_deg_max: Optional[int] = None
) -> Settings:
    """The application settings with the command-line overrides applied."""
    settings = app_settings.model_copy(deep=True)
    if t_prec is not None:
        settings.precision.T_PRECISION = t_prec
    if x_deg_start is not None:
        settings.window.X_DEG_START = x_deg_start
    if x_deg_max is not None:
        settings.window.X_DEG_MAX = x_deg_max
    if settings.window.X_DEG_START > settings.window.X_DEG_MAX:
        raise typer.BadParameter("--x-deg-start exceeds --x-deg-max")
    return settings


def command_echo(ctx: typer.Context) -> list[str]:
    echo = [ctx.info_name]
    for name, value in sorted(ctx.params.items()):
        if value is None or value is False or value == []:
            continue
        if isinstance(value, (list, tuple)):
            echo += [f"--{name.replace('_', '-')}={item}" for item in value]
        else:
            echo.append(f"--{name.replace('_', '-')}={getattr(value, 'value', value)}")
    return echo


def run(
    ctx: typer.Context,
    action: Callable[[DRService], Any],
    pretty: bool,
    t_prec: Optional[int] = None,
    x_deg_start: Optional[int] = None,
    x_deg_max: Optional[int] = None,
):
    """Run ``action`` against a service built from the invocation settings and print the report."""
    settings = invocation_settings(t_prec, x_deg_start, x_deg_max)
    collector = configure_logging(settings.log.LEVEL)
    report = RunReport(
        command=command_echo(ctx),
        t_precision=settings.precision.T_PRECISION,
        degree_windows=DegreeWindows(start=settings.window.X_DEG_START, max=settings.window.X_DEG_MAX),
    )
    try:
        result = action(DRService(settings))
        if isinstance(result, tuple):
            passed, result = result
            report.exit_status = 0 if passed else 1
        report.result = result
    except TateDRError as err:
        failure = isinstance(err, MathematicalFailure)
        logger.error("%s: %s", type(err).__name__, err)
        if isinstance(err, NoStabilization):
            collector.messages.append(f"no stabilization, trajectory {err.trajectory}")
        report.exit_status = 1 if failure else 2
        report.error = ErrorSummary(
            message=str(err), type=ErrorType.MATHEMATICAL if failure else ErrorType.USAGE, name=type(err).__name__
        )
    report.warnings = collector.messages
    payload = report.model_dump(by_alias=True, mode="json")
    typer.echo(json.dumps(payload, sort_keys=True, indent=2 if pretty else None))
    raise typer.Exit(report.exit_status)


@app.command("eval")
def eval_command(
    ctx: typer.Context, expression: Expression, dim: Dim = 1, t_prec: TPrecision = None, pretty: Pretty = False
):
    """Print the normal form of an operator."""
    run(ctx, lambda service: service.evaluate(expression, dim), pretty, t_prec)


@app.command()
def norm(ctx: typer.Context, expression: Expression, dim: Dim = 1, t_prec: TPrecision = None, pretty: Pretty = False):
    """Print the operator norm as a log-norm."""
    run(ctx, lambda service: service.norm(expression, dim), pretty, t_prec)


@app.command()
def transpose(
    ctx: typer.Context, expression: Expression, dim: Dim = 1, t_prec: TPrecision = None, pretty: Pretty = False
):
    """Print the image of an operator under the involution."""
    run(ctx, lambda service: service.transpose(expression, dim), pretty, t_prec)


@app.command()
def invert(
    ctx: typer.Context, expression: Expression, dim: Dim = 1, t_prec: TPrecision = None, pretty: Pretty = False
):
    """Invert a unit of the completed Weyl algebra."""
    run(ctx, lambda service: service.invert(expression, dim), pretty, t_prec)


@app.command("apply")
def apply_command(
    ctx: typer.Context,
    operator: Expression,
    function: Annotated[str, typer.Argument(help="A Tate-algebra element, e.g. 'x1^2 + t'.")],
    dim: Dim = 1,
    t_prec: TPrecision = None,
    pretty: Pretty = False,
):
    """Apply an operator to a function."""
    run(ctx, lambda service: service.apply(operator, function, dim), pretty, t_prec)


@app.command()
def dr(
    ctx: typer.Context,
    relation: Annotated[Optional[list[str]], typer.Option("--relation", "-r", help="A relation.")] = None,
    matrix: Annotated[
        Optional[Path], typer.Option("--matrix", exists=True, dir_okay=False, help="A connection matrix file.")
    ] = None,
    spectral: Annotated[bool, typer.Option("--spectral", help="Estimate the spectral radius.")] = False,
    chi: Annotated[bool, typer.Option("--chi", help="Compare with the Euler characteristic of the reduction.")] = False,
    hat: Annotated[bool, typer.Option("--hat", help="Compare with the completed route.")] = False,
    dim: Dim = 1,
    t_prec: TPrecision = None,
    x_deg_start: XDegStart = None,
    x_deg_max: XDegMax = None,
    pretty: Pretty = False,
):
    """Compute de Rham cohomology on the polydisc."""
    run(
        ctx,
        lambda service: service.dr(relation or [], dim, matrix, spectral, chi, hat),
        pretty,
        t_prec,
        x_deg_start,
        x_deg_max,
    )


@app.command()
def holonomic(
    ctx: typer.Context, relations: Relations, dim: Dim = 1, t_prec: TPrecision = None, pretty: Pretty = False
):
    """Report the characteristic variety and holonomicity of a cyclic module."""
    run(ctx, lambda service: service.holonomic(relations, dim), pretty, t_prec)


@app.command("char-dim")
def char_dim(
    ctx: typer.Context, relations: Relations, dim: Dim = 1, t_prec: TPrecision = None, pretty: Pretty = False
):
    """Print the dimension of the characteristic variety of a cyclic module."""
    run(ctx, lambda service: service.char_dim(relations, dim), pretty, t_prec)


@app.command("direct-image")
def direct_image(
    ctx: typer.Context,
    relation: Annotated[list[str], typer.Option("--relation", "-r", help="A relation of the source module.")],
    ambient_dim: Annotated[int, typer.Option("--ambient-dim", min=2, help="Dimension of the ambient polydisc.")],
    verify: Annotated[Optional[DirectImageCheck], typer.Option("--verify", help="Chain-level check to run.")] = None,
    dim: Dim = 1,
    t_prec: TPrecision = None,
    x_deg_start: XDegStart = None,
    x_deg_max: XDegMax = None,
    pretty: Pretty = False,
):
    """Push a cyclic module forward along a coordinate embedding."""
    run(
        ctx,
        lambda service: service.direct_image(relation, dim, ambient_dim, verify),
        pretty,
        t_prec,
        x_deg_start,
        x_deg_max,
    )


@app.command()
def verify(
    ctx: typer.Context,
    suite: Annotated[VerifySuite, typer.Argument(help="The suite to run.")] = VerifySuite.ALL,
    t_prec: TPrecision = None,
    x_deg_start: XDegStart = None,
    x_deg_max: XDegMax = None,
    pretty: Pretty = False,
):
    """Run verification suites."""

    def action(service: DRService):
        passed, reports = service.verify(suite)
        return passed, {"passed": passed, "suites": [r.model_dump(by_alias=True, mode="json") for r in reports]}

    run(ctx, action, pretty, t_prec, x_deg_start, x_deg_max)

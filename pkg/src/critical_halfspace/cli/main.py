from __future__ import annotations

import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from critical_halfspace.config.defaults import DEFAULTS
from critical_halfspace.config.loader import build_run_config
from critical_halfspace.experiments import get_experiment, list_experiments
from critical_halfspace.logging.report import ReportWriter

console = Console()

Decorator = Callable[[Callable[..., Any]], Callable[..., Any]]


def _number_list(kind: type) -> Callable[[click.Context, click.Parameter, str | None], Any]:
    def parse(ctx: click.Context, param: click.Parameter, value: str | None) -> Any:
        if value is None:
            return None
        try:
            return [kind(v) for v in value.split(",") if v.strip()]
        except ValueError as exc:
            raise click.BadParameter(f"expected comma-separated numbers, got {value!r}") from exc

    return parse


def _options(*decorators: Decorator) -> Decorator:
    def apply(f: Callable[..., Any]) -> Callable[..., Any]:
        for decorator in reversed(decorators):
            f = decorator(f)
        return f

    return apply


common_options = _options(
    click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                  default=None, help="Flat YAML file of run settings"),
    click.option("--n", type=int, default=None, help="Dimension n >= 3"),
    click.option("--seed", type=int, default=None, help="Index into the Halton sequence"),
    click.option("--threads", type=int, default=None, help="Worker threads for plane sweeps"),
    click.option("--output-dir", default=None, help="Directory for reports"),
    click.option("--dump-csv/--no-dump-csv", default=None, help="Write CSV field dumps"),
    click.option("--verbose", "-v", is_flag=True, help="Write debug.log into the run directory"),
)

exponent_options = _options(
    click.option("--q-exponent", "q", type=float, default=None,
                 help="Interior exponent (default (n+2)/(n-2))"),
    click.option("--p-exponent", "p", type=float, default=None,
                 help="Boundary exponent (default n/(n-2))"),
)

bubble_options = _options(
    click.option("--lambda", "lam", type=float, default=None, help="Bubble scale"),
    click.option("--y-prime", callback=_number_list(float), default=None,
                 help="Tangential center, comma-separated; padded with zeros to n-1"),
    exponent_options,
)

family_options = _options(
    click.option("--family", type=click.Choice(["bubble", "harmonic"]), default=None),
    click.option("--c", type=float, default=None, help="Harmonic coefficient"),
)

sampling_options = _options(
    click.option("--samples", type=int, default=None),
    click.option("--sample-radius", type=float, default=None),
    click.option("--tol", type=float, default=None, help="Residual tolerance"),
)

kelvin_option = click.option(
    "--kelvin-center", callback=_number_list(float), default=None,
    help="Tangential coordinates of the boundary inversion center",
)

sweep_options = _options(
    click.option("--lambda-min", type=float, default=None),
    click.option("--lambda-max", type=float, default=None),
    click.option("--lambda-count", type=int, default=None),
    click.option("--sigma-samples", type=int, default=None),
    click.option("--sigma-radius", type=float, default=None),
    click.option("--plane-tol", type=float, default=None),
    click.option("--bisect-width", type=float, default=None),
    click.option("--axis-tol", type=float, default=None),
    click.option("--asymmetry-tol", type=float, default=None),
)

newton_options = _options(
    click.option("--lambda", "lam", type=float, default=None, help="Bubble scale"),
    exponent_options,
    click.option("--extent", type=float, default=None, help="R_r = R_z of the truncated domain"),
    click.option("--newton-tol", type=float, default=None),
    click.option("--max-iter", type=int, default=None),
    click.option("--damping", type=float, default=None),
    click.option("--continuation-steps", type=int, default=None),
)


def _attach_debug_log(run_dir: Path) -> logging.Handler:
    log_path = run_dir / "debug.log"
    pkg_logger = logging.getLogger("critical_halfspace")
    pkg_logger.setLevel(logging.DEBUG)
    fh = logging.FileHandler(log_path)
    fh.setLevel(logging.DEBUG)
    fh.setFormatter(logging.Formatter("%(asctime)s [%(name)s]\n%(message)s\n"))
    pkg_logger.addHandler(fh)
    return fh


def _run(subcommand: str, options: dict[str, Any]) -> None:
    config_path = options.pop("config_path", None)
    verbose = options.pop("verbose", False)
    try:
        config = build_run_config(subcommand, config_path, options)
    except (ValidationError, ValueError) as exc:
        raise click.UsageError(str(exc)) from exc

    writer = ReportWriter(config)
    handler = _attach_debug_log(writer.run_dir) if verbose else None
    try:
        console.print(f"[bold]{subcommand}[/bold] n={config.n}")
        report = get_experiment(subcommand).run(config)
        path = writer.write(report)
    finally:
        if handler is not None:
            logging.getLogger("critical_halfspace").removeHandler(handler)
            handler.close()

    if report.passed:
        console.print(f"[green]pass[/green] {path}")
    else:
        console.print(f"[red]fail[/red] {', '.join(report.failures)} ({path})")
    click.get_current_context().exit(0 if report.passed else 1)


def _show_defaults() -> None:
    table = Table(title="Run defaults")
    table.add_column("Key", style="cyan")
    table.add_column("Default")
    for key, value in DEFAULTS.items():
        table.add_row(key, "critical value" if value is None and key in ("q", "p") else repr(value))
    console.print(table)


@click.group(invoke_without_command=True)
@click.option("--show-defaults", is_flag=True, help="Print the defaults table and exit")
@click.pass_context
def cli(ctx: click.Context, show_defaults: bool) -> None:
    """Numerical checks for the critical half-space problem with nonlinear boundary condition."""
    if show_defaults:
        _show_defaults()
        ctx.exit(0)
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@cli.command("verify-bubble")
@common_options
@bubble_options
@family_options
@sampling_options
def verify_bubble_cmd(**options: Any) -> None:
    """Residuals of the explicit solution family in the interior and on the boundary."""
    _run("verify-bubble", options)


@cli.command("kelvin-check")
@common_options
@bubble_options
@sampling_options
@kelvin_option
def kelvin_check_cmd(**options: Any) -> None:
    """Transformed system and refit of the Kelvin image about a boundary point."""
    _run("kelvin-check", options)


@cli.command("moving-plane")
@common_options
@bubble_options
@sweep_options
def moving_plane_cmd(**options: Any) -> None:
    """Sweep planes x1 = lambda over the Kelvin image about the origin."""
    _run("moving-plane", options)


@cli.command("detect-axis")
@common_options
@bubble_options
@sweep_options
@kelvin_option
def detect_axis_cmd(**options: Any) -> None:
    """Locate the symmetry axis along every tangential direction."""
    _run("detect-axis", options)


@cli.command("decay")
@common_options
@bubble_options
@family_options
@click.option("--radii", callback=_number_list(float), default=None)
@click.option("--directions", type=int, default=None)
def decay_cmd(**options: Any) -> None:
    """Extrapolated far-field limits."""
    _run("decay", options)


@cli.command("find-scale")
@common_options
@bubble_options
@sweep_options
@click.option("--s-lo", type=float, default=None)
@click.option("--s-hi", type=float, default=None)
def find_scale_cmd(**options: Any) -> None:
    """Solve g_s'(1/2) = 0 and check the axis of the resulting Kelvin image."""
    _run("find-scale", options)


@cli.command("shoot-ode")
@common_options
@exponent_options
@click.option("--c", type=float, default=None, help="Initial height u(0)")
@click.option("--step", type=float, default=None)
@click.option("--t-max", type=float, default=None)
def shoot_ode_cmd(**options: Any) -> None:
    """Integrate the x_n-only reduction until u changes sign."""
    _run("shoot-ode", options)


@cli.command("boundary-profile")
@common_options
@bubble_options
@sampling_options
def boundary_profile_cmd(**options: Any) -> None:
    """Fit the restriction to x_n = 0."""
    _run("boundary-profile", options)


@cli.command("solve")
@common_options
@newton_options
@click.option("--mode", type=click.Choice(["manufactured", "blind"]), default=None)
@click.option("--cells", type=int, default=None)
@click.option("--perturbation", type=float, default=None)
@click.option("--fit-rtol", type=float, default=None)
def solve_cmd(**options: Any) -> None:
    """Newton solve on the axisymmetric grid."""
    _run("solve", options)


@cli.command("convergence")
@common_options
@newton_options
@click.option("--grid-cells", callback=_number_list(int), default=None)
@click.option("--order-tol", type=float, default=None)
@click.option("--skip-unresolved/--no-skip-unresolved", default=None,
              help="Drop grids where Newton fails instead of aborting the study")
def convergence_cmd(**options: Any) -> None:
    """Observed order under grid refinement."""
    _run("convergence", options)


@cli.command("list-experiments")
def list_experiments_cmd() -> None:
    """List available subcommands."""
    table = Table(title="Available Experiments")
    table.add_column("Name", style="cyan")
    table.add_column("Description")

    for name in list_experiments():
        table.add_row(name, get_experiment(name).description)

    console.print(table)


if __name__ == "__main__":
    cli()

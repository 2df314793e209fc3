"""
kcc-jacobi command line.

    analyze     Jacobi/linear stability report of the Lorenz equilibria
    trajectory  Lorenz trajectory with the deviation curvature along it
    deviation   deviation vector, instability exponents and κ₀
    sweep       S± stability conditions over a parameter grid

Exit codes: 0 success, 2 usage/config/parameter/output error,
3 domain error, 4 numerical failure.
"""
import asyncio
import functools
import logging
from typing import Any, Callable, List, Optional, Sequence, Union

import click
import numpy as np
from pydantic import ValidationError

from config import settings
from dynamics.deviation import find_t0, first_sign_change, instability_exponents, integrate_deviation
from dynamics.integrators import integrate_lorenz, p_along_trajectory, single_sample
from dynamics.models import Anchor, IntegratorMethod
from geometry.errors import KccError, ParameterError

from .export import render_table
from .report import build_report, report_rows, report_to_json
from .runconfig import OutputFormat, RunConfig, build_run_config
from .storage import write_output
from .sweep import SWEEP_COLUMNS, grid_points, run_sweep

logger = logging.getLogger(__name__)

EXIT_USAGE = 2

TRAJECTORY_COLUMNS = ["t", "X", "Y", "Z", "P11", "P12", "P21", "P22"]
DEVIATION_COLUMNS = ["t", "xi1", "xi2", "xi_norm", "delta1", "delta2", "delta", "kappa0"]


def handle_errors(command: Callable) -> Callable:
    """Map toolkit errors to exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except KccError as e:
            logger.error(f"{ctx.command.name}: {e.message}")
            click.echo(f"error: {e.message}", err=True)
            ctx.exit(e.exit_code)
        except ValidationError as e:
            message = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
            logger.error(f"{ctx.command.name}: invalid options: {message}")
            click.echo(f"error: invalid options: {message}", err=True)
            ctx.exit(EXIT_USAGE)

    return wrapper


def _options(ctx: click.Context, **flags: Any) -> RunConfig:
    config_path = flags.pop("config", None)
    cfg = build_run_config(flags, config_path)
    logger.info(f"{ctx.command.name}: sigma={cfg.sigma!r} rho={cfg.rho!r} beta={cfg.beta!r}")
    return cfg


def _emit(cfg: RunConfig, title: str, payload: Union[str, bytes]) -> None:
    if cfg.out:
        write_output(cfg.out, payload)
        return
    if isinstance(payload, bytes):
        raise ParameterError(f"{title}: --format xlsx needs --out")
    click.echo(payload, nl=False)


def _note(cfg: RunConfig, line: str) -> None:
    """Summary lines go to stdout only when the data went to a file."""
    click.echo(line, err=not cfg.out)


def _table(cfg: RunConfig, title: str, header: Sequence[str], rows: List[Sequence[Any]]) -> None:
    _emit(cfg, title, render_table(cfg.format.value, title, header, rows))


# ==================== OPTIONS ====================

def parameter_options(command: Callable) -> Callable:
    for option in reversed([
        click.option("--sigma", type=float, default=None, help="Prandtl number σ."),
        click.option("--rho", type=float, default=None, help="Rayleigh ratio ρ."),
        click.option("--beta", type=float, default=None, help="Geometric factor β."),
        click.option("--format", "format", type=click.Choice([f.value for f in OutputFormat]), default=None),
        click.option("--out", type=str, default=None, help="Output file (stdout when omitted)."),
        click.option("--config", type=str, default=None, help="key=value file; flags override it."),
    ]):
        command = option(command)
    return command


def integration_options(command: Callable) -> Callable:
    for option in reversed([
        click.option("--t-end", "t_end", type=float, default=None),
        click.option("--step", type=float, default=None, help="Fixed RK4 step."),
        click.option("--tol", type=float, default=None, help="Adaptive tolerance (abs = rel)."),
        click.option("--method", type=click.Choice([m.value for m in IntegratorMethod]), default=None),
        click.option("--sample-every", "sample_every", type=float, default=None),
    ]):
        command = option(command)
    return command


@click.group(name="kcc-jacobi")
def cli():
    """KCC (Jacobi) stability analysis of the Lorenz system."""


# ==================== COMMANDS ====================

@cli.command()
@parameter_options
@handle_errors
def analyze(**flags):
    """Stability report for all equilibria."""
    cfg = _options(click.get_current_context(), **flags)
    report = build_report(cfg.params())
    if cfg.format is OutputFormat.JSON:
        _emit(cfg, "analyze", report_to_json(report))
    else:
        header, rows = report_rows(report)
        _table(cfg, "analyze", header, rows)


@cli.command()
@parameter_options
@integration_options
@click.option("--x0", type=float, default=None)
@click.option("--y0", type=float, default=None)
@click.option("--z0", type=float, default=None)
@handle_errors
def trajectory(**flags):
    """Lorenz trajectory with P along it."""
    cfg = _options(click.get_current_context(), **flags)
    p = cfg.params()
    p.require_reducible()
    integrator = cfg.integrator(IntegratorMethod.RK4_FIXED, settings.trajectory_t_end)
    traj = integrate_lorenz(p, cfg.initial_state(), integrator)
    curvature = p_along_trajectory(p, traj).reshape(len(traj), 4)
    rows = np.column_stack([traj.times, traj.states, curvature]).tolist()
    _table(cfg, "trajectory", TRAJECTORY_COLUMNS, rows)


@cli.command()
@parameter_options
@integration_options
@click.option("--anchor", type=click.Choice([a.value for a in Anchor]), default=None)
@click.option("--xi10", type=float, default=None, help="Initial deviation velocity ξ̇¹(0).")
@click.option("--xi20", type=float, default=None, help="Initial deviation velocity ξ̇²(0).")
@click.option("--x0", type=float, default=None, help="Reference start for --anchor along.")
@click.option("--y0", type=float, default=None)
@click.option("--z0", type=float, default=None)
@click.option("--t0/--no-t0", "t0", default=None, help="Report the first sign change of κ₀.")
@click.option("--t0-max", "t0_max", type=float, default=None)
@click.option("--t0-crit", "t0_crit", type=float, default=None, help="Critical onset time to compare t₀ with.")
@handle_errors
def deviation(**flags):
    """Deviation vector, δ(T) exponents and κ₀."""
    cfg = _options(click.get_current_context(), **flags)
    p = cfg.params()
    integrator = cfg.integrator(IntegratorMethod.RK45_ADAPTIVE, settings.deviation_t_end)
    reference = None
    if cfg.anchor is Anchor.ALONG_TRAJECTORY:
        reference = single_sample(p, cfg.initial_state())
    trace = integrate_deviation(p, cfg.anchor, ((0.0, 0.0), (cfg.xi10, cfg.xi20)), integrator, reference)
    rows = np.column_stack([
        trace.times, trace.xi1, trace.xi2, trace.xi_norm,
        trace.delta1, trace.delta2, trace.delta, trace.kappa0,
    ]).tolist()
    _table(cfg, "deviation", DEVIATION_COLUMNS, rows)

    exponents = instability_exponents(trace)
    logger.info(
        f"delta1(T)={exponents.delta1!r} delta2(T)={exponents.delta2!r} delta(T)={exponents.delta!r} T={exponents.t!r}"
    )
    if cfg.t0:
        onset = find_t0(p, cfg.xi10, cfg.xi20, t_max=cfg.t0_max)
        if onset.found:
            _note(cfg, f"t0={onset.t0!r} approximation={onset.approximation!r} ratio={onset.t0 / onset.approximation!r}")
            _note(cfg, f"xi1(t0)-xi2(t0)={onset.xi_gap!r} kappa0(t0_max)={onset.kappa0_at_horizon!r}")
        else:
            _note(cfg, f"t0=none approximation={onset.approximation!r} sign_pattern={onset.sign_pattern}")
        if cfg.anchor is not Anchor.S0:
            _note(cfg, f"trace_sign_change={first_sign_change(trace)!r}")
        if cfg.t0_crit is not None:
            _note(cfg, f"onset={'early' if onset.is_early(cfg.t0_crit) else 'late'} t0_crit={cfg.t0_crit!r}")


@cli.command()
@parameter_options
@click.option("--grid-sigma", "grid_sigma", type=str, default=None, help="A:B:STEP or comma list.")
@click.option("--grid-rho", "grid_rho", type=str, default=None)
@click.option("--grid-beta", "grid_beta", type=str, default=None)
@click.option("--t0/--no-t0", "t0", default=None, help="Add the κ₀ sign-change time per point.")
@click.option("--t0-max", "t0_max", type=float, default=None)
@click.option("--xi10", type=float, default=None)
@click.option("--xi20", type=float, default=None)
@handle_errors
def sweep(**flags):
    """S± stability conditions over a parameter grid."""
    cfg = _options(click.get_current_context(), **flags)
    grids = {name: cfg.grid(name) for name in ("sigma", "rho", "beta")}
    if all(values is None for values in grids.values()):
        raise ParameterError("sweep needs at least one of --grid-sigma, --grid-rho, --grid-beta")
    points = grid_points(
        grids["sigma"] or [cfg.sigma],
        grids["rho"] or [cfg.rho],
        grids["beta"] or [cfg.beta],
    )
    logger.info(f"Sweep over {len(points)} grid points")
    rows = asyncio.run(run_sweep(
        points,
        workers=settings.sweep_workers,
        with_t0=cfg.t0,
        xi10=cfg.xi10,
        xi20=cfg.xi20,
        t0_max=cfg.t0_max,
    ))
    _table(cfg, "sweep", SWEEP_COLUMNS, rows)

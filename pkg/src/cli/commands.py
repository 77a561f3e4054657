"""CLI commands for novikov-lab"""

import logging
from pathlib import Path

import click
from pydantic import ValidationError
from rich.logging import RichHandler
from sqlalchemy.exc import SQLAlchemyError

from src.cli.pipelines import EXIT_CONFIG, EXIT_OK, run_experiment
from src.cli.report import console, print_artifacts, print_bound_checks, print_history, print_run_summary
from src.config.experiment import Command, load_config
from src.database.manager import RunLedger

logger = logging.getLogger(__name__)


def _setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def experiment_options(func):
    func = click.option('--out', '-o', type=click.Path(file_okay=False), help='Output directory (overrides output_dir)')(func)
    func = click.option('--config', '-c', 'config_path', required=True, type=click.Path(), help='Experiment config (.json or .yml)')(func)
    return func


def _run(ctx: click.Context, command: Command, config_path: str, out: str):
    click.echo(f"🔧 Loading {config_path}...")
    try:
        cfg = load_config(config_path, command.value)
        if out:
            cfg = cfg.model_copy(update={"output_dir": Path(out)})
    except (ValidationError, ValueError, OSError) as e:
        click.echo(f"❌ Invalid config: {str(e)}", err=True)
        ctx.exit(EXIT_CONFIG)

    click.echo(f"🚀 Running {command.value} (grid n={cfg.grid.n}, t_end={cfg.time.t_end}, solver={cfg.solver.value})...")
    result = run_experiment(cfg)

    try:
        ctx.obj["ledger"].record_run(
            command=command.value,
            input_hash=result.input_hash,
            output_dir=str(cfg.output_dir),
            exit_code=result.exit_code,
            note=result.note,
            t_star=result.outcome.t_star,
            wall_seconds=result.wall_seconds,
            summary={"note": result.note},
        )
    except SQLAlchemyError as e:
        logger.warning("run not recorded in ledger: %s", e)

    if result.exit_code == EXIT_OK:
        summary = result.outcome.summary
        print_run_summary(command.value, summary)
        for key in ("bounds_initial", "bounds_final"):
            if key in summary:
                print_bound_checks(summary[key].model_dump()["checks"], title=key.replace("_", " "))
        click.echo(f"\n✅ Done in {result.wall_seconds:.2f}s")
    else:
        click.echo(f"❌ {command.value} stopped with exit code {result.exit_code}: {result.note}", err=True)

    manifest = cfg.output_dir / "manifest.json"
    if manifest.exists():
        print_artifacts(str(cfg.output_dir), sorted(p.name for p in cfg.output_dir.iterdir()))
    ctx.exit(result.exit_code)


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Debug logging')
@click.option('--db', 'database_url', default=None, help='Run ledger URL (default sqlite:///novikov_lab.db)')
@click.pass_context
def cli(ctx, verbose, database_url):
    """novikov-lab - Novikov equation conservative solutions, peakon collisions and Finsler transport"""
    _setup_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["ledger"] = RunLedger(database_url)


@cli.command()
@experiment_options
@click.pass_context
def peakons(ctx, config_path, out):
    """Integrate the multi-peakon ODE system up to the first crossing"""
    _run(ctx, Command.PEAKONS, config_path, out)


@cli.command()
@experiment_options
@click.pass_context
def semilinear(ctx, config_path, out):
    """Solve the semi-linear system in characteristic coordinates"""
    _run(ctx, Command.SEMILINEAR, config_path, out)


@cli.command()
@experiment_options
@click.pass_context
def smooth(ctx, config_path, out):
    """Evolve smooth data in x-space and report conservation"""
    _run(ctx, Command.SMOOTH, config_path, out)


@cli.command()
@experiment_options
@click.pass_context
def metric(ctx, config_path, out):
    """Distance comparisons and tangent growth along a smooth solution"""
    _run(ctx, Command.METRIC, config_path, out)


@cli.command()
@experiment_options
@click.pass_context
def ch(ctx, config_path, out):
    """Camassa-Holm evolution, cost and tangent growth"""
    _run(ctx, Command.CH, config_path, out)


@cli.command()
@experiment_options
@click.pass_context
def concentration(ctx, config_path, out):
    """Energy concentration between two colliding peakons"""
    _run(ctx, Command.CONCENTRATION, config_path, out)


@cli.command()
@click.option('--limit', '-l', type=int, default=20, help='Maximum runs to show')
@click.option('--command', '-c', 'command', type=click.Choice([c.value for c in Command]), help='Only this command')
@click.option('--input-hash', '-i', 'input_hash', help='Every run of one config (hash or prefix), oldest first')
@click.pass_context
def history(ctx, limit, command, input_hash):
    """Show recently recorded runs"""
    ledger = ctx.obj["ledger"]
    if input_hash:
        print_history(ledger.runs_for_input(input_hash), title=f"Runs of input {input_hash[:8]}")
    else:
        print_history(ledger.recent_runs(limit=limit, command=command), total=ledger.count_runs())

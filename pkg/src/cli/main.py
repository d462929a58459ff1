"""
Command-line entry point: run scenarios and validate scenario files.
"""

import logging
import sys
from pathlib import Path

import click
from pydantic import ValidationError

# Add the src directory to Python path
sys.path.append(str(Path(__file__).parent.parent))

from models.errors import ConfigurationError
from services.report_writer import summary_table
from services.simulation_service import SimulationService
from utils.config import create_default_config, load_scenario, load_settings, validate_config
from utils.logging import log_error, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

SCENARIOS = ["se-sweep", "se-ee", "ber-curve", "selftest"]


@click.group()
@click.option("--log-level", default=None, help="Overrides OWSIM_LOG_LEVEL.")
@click.pass_context
def cli(ctx: click.Context, log_level):
    """Optical OFDM / OFDM-IM link simulator."""
    settings = load_settings()
    if log_level:
        settings["log_level"] = log_level
    try:
        setup_logging(settings["log_level"], settings["log_file"])
    except ValueError as e:
        click.echo(str(e), err=True)
        ctx.exit(EXIT_CONFIG)
    ctx.obj = settings


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Scenario TOML file.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Root seed.")
@click.option("--out", "output_dir", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--jobs", type=click.IntRange(1), default=None, help="Worker processes.")
@click.option("--scenario", type=click.Choice(SCENARIOS), default=None, help="Overrides [scenario].name.")
@click.pass_obj
def run(settings, config_path, seed, output_dir, jobs, scenario):
    """Run a scenario and write its CSV and plot script."""
    try:
        config = load_scenario(config_path)
    except (ConfigurationError, ValidationError, OSError) as e:
        click.echo(str(e), err=True)
        sys.exit(EXIT_CONFIG)

    try:
        result = SimulationService(settings).run(
            config, seed=seed, scenario=scenario, output_dir=output_dir, jobs=jobs
        )
    except Exception as e:
        log_error(e, "run", logger)
        sys.exit(EXIT_RUNTIME)

    if result.records:
        click.echo(summary_table(result.records))
    if result.selftest is not None:
        for check in result.selftest.checks:
            click.echo(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {check.detail}")
    if result.csv_path:
        click.echo(f"CSV: {result.csv_path}")
        click.echo(f"Plot script: {result.plot_path}")

    if not result.success:
        click.echo(result.error_message, err=True)
        sys.exit(EXIT_RUNTIME)
    click.echo(f"Done in {result.processing_time:.2f}s")
    sys.exit(EXIT_OK)


@cli.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
def validate(config_path):
    """Report every problem in a scenario file without running it."""
    try:
        problems = validate_config(config_path)
    except OSError as e:
        click.echo(f"{config_path}: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    for problem in problems:
        click.echo(problem)
    if problems:
        sys.exit(EXIT_CONFIG)
    click.echo(f"{config_path}: OK")


@cli.command()
@click.argument("config_path", type=click.Path(dir_okay=False), default="configs/default.toml")
def init(config_path):
    """Write a commented default scenario file."""
    if not create_default_config(config_path):
        sys.exit(EXIT_RUNTIME)
    click.echo(f"Wrote {config_path}")


def main():
    cli()


if __name__ == "__main__":
    main()

"""formalcurves CLI.

Command-line interface for the expression language and the property suites.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.table import Table

from formalcurves import __version__
from formalcurves.checks import CheckRunner, PropertyResult, Suite
from formalcurves.config import (
    Config,
    create_default_config,
    load_config,
    resolve_ring,
    save_config,
)
from formalcurves.dsl import dumps, error_doc, run as run_source
from formalcurves.errors import FormalCurvesError, FrontEndError


def setup_logging(debug: bool = False, level: str = "WARNING") -> None:
    """Configure logging on stderr; stdout carries JSON only."""
    logging.basicConfig(
        level=logging.DEBUG if debug else getattr(logging, level.upper(), logging.WARNING),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
    )


logger = logging.getLogger(__name__)

app = typer.Typer(
    name="formalcurves",
    help="formalcurves - exact algebra of framed formal curves",
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)

EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2


def version_callback(value: bool) -> None:
    """Show version and exit."""
    if value:
        console.print(f"formalcurves version {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: bool = typer.Option(
        False, "--version", "-v",
        callback=version_callback, is_eager=True,
        help="Show version and exit.",
    ),
) -> None:
    """formalcurves - exact algebra of framed formal curves."""
    pass


def _load(config_file: Optional[Path]) -> Config:
    return load_config(str(config_file) if config_file else None)


def _read_source(file: Optional[str], expr: Optional[str]) -> str:
    if expr is not None:
        return expr
    if file is None or file == "-":
        return sys.stdin.read()
    path = Path(file)
    if not path.is_file():
        err_console.print(f"[red]Error:[/red] no such program file: {file}")
        raise typer.Exit(EXIT_USAGE_ERROR)
    return path.read_text()


@app.command()
def run(
    file: Optional[str] = typer.Argument(None, help="Program file, or - for stdin."),
    ring: Optional[str] = typer.Option(None, "--ring", "-r", help="Ring as m=<int>,N=<int>."),
    expr: Optional[str] = typer.Option(None, "--expr", "-e", help="Program text instead of a file."),
    pretty: Optional[bool] = typer.Option(None, "--pretty/--json", help="Indented or compact JSON."),
    config_file: Optional[Path] = typer.Option(None, "--config", "-c", help="Config file path."),
    debug: bool = typer.Option(False, "--debug"),
) -> None:
    """Evaluate a program and print its value as JSON."""
    cfg = _load(config_file)
    setup_logging(debug, cfg.log_level)
    source = _read_source(file, expr)
    pretty = cfg.output.pretty if pretty is None else pretty

    try:
        spec = resolve_ring(ring, cfg)
        logger.info(f"Evaluating over {spec.describe()}")
        doc = run_source(source, spec)
    except FrontEndError as e:
        logger.debug(f"Front-end error: {e.message}")
        typer.echo(dumps(error_doc(e), pretty, cfg.output.indent))
        raise typer.Exit(EXIT_USAGE_ERROR)
    except FormalCurvesError as e:
        logger.debug(f"Domain error: {e.message}")
        typer.echo(dumps(error_doc(e), pretty, cfg.output.indent))
        raise typer.Exit(EXIT_DOMAIN_ERROR)

    typer.echo(dumps(doc, pretty, cfg.output.indent))


@app.command()
def check(
    suite: Suite = typer.Argument(Suite.ALL, help="Property suite to run."),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Seed for randomized suites."),
    trials: Optional[int] = typer.Option(None, "--trials", "-t", min=1, help="Trials per randomized property."),
    config_file: Optional[Path] = typer.Option(None, "--config", "-c", help="Config file path."),
    as_json: bool = typer.Option(False, "--json", help="Print the reports as JSON."),
    debug: bool = typer.Option(False, "--debug"),
) -> None:
    """Run property suites and report failures."""
    cfg = _load(config_file)
    setup_logging(debug, cfg.log_level)
    if seed is not None:
        cfg.checks.seed = seed
    if trials is not None:
        cfg.checks.trials = trials
        cfg.checks.suite_trials = {}

    def on_result(result: PropertyResult) -> None:
        if not as_json:
            mark = "[green]ok[/green]" if result.passed else "[red]FAIL[/red]"
            err_console.print(f"{result.suite}.{result.name} {mark}")

    def on_error(message: str) -> None:
        if not as_json:
            err_console.print(f"[red]Error:[/red] {message}")

    runner = CheckRunner(cfg.checks, on_result=on_result, on_error=on_error)
    reports = runner.run(suite)

    if as_json:
        typer.echo(json.dumps([r.model_dump() for r in reports], sort_keys=True, indent=2))
    else:
        table = Table(title=f"Property suites (seed {cfg.checks.seed})")
        table.add_column("Suite", style="cyan")
        table.add_column("Property")
        table.add_column("Trials", justify="right")
        table.add_column("Result", justify="center")
        table.add_column("Detail")
        for report in reports:
            for r in report.results:
                status = "[green]passed[/green]" if r.passed else f"[red]{r.failures} failed[/red]"
                table.add_row(r.suite, r.name, str(r.trials), status, r.detail or "")
        console.print(table)

    if not all(r.passed for r in reports):
        raise typer.Exit(EXIT_DOMAIN_ERROR)


@app.command()
def config(
    show: bool = typer.Option(False, "--show", "-s"),
    init: bool = typer.Option(False, "--init", "-i"),
    path: Optional[Path] = typer.Option(None, "--path", "-p"),
) -> None:
    """Show or create configuration."""
    if init:
        out_path = path or Path("formalcurves.json")
        cfg = create_default_config()
        save_config(cfg, str(out_path))
        console.print(f"[green]Created:[/green] {out_path}")
        return

    cfg = _load(path)

    table = Table(title="Configuration")
    table.add_column("Setting", style="cyan")
    table.add_column("Value")

    table.add_row("Ring", cfg.ring.to_spec().describe())
    table.add_row("Check seed", str(cfg.checks.seed))
    table.add_row("Check trials", str(cfg.checks.trials))
    if cfg.checks.suite_trials:
        table.add_row("Suite trials", ", ".join(f"{k}={v}" for k, v in sorted(cfg.checks.suite_trials.items())))
    table.add_row("Check ring", cfg.checks.spec().describe())
    bounds = cfg.checks.corolla
    table.add_row(
        "Corolla bounds",
        f"vertices<={bounds.max_vertices} valence<={bounds.max_valence} "
        f"genus<={bounds.max_genus} edges<={bounds.max_edges}",
    )
    table.add_row("Mutation threshold", f"{cfg.checks.mutation_threshold:.2f}")
    table.add_row("Pretty output", "on" if cfg.output.pretty else "off")
    table.add_row("Log level", cfg.log_level)

    console.print(table)


if __name__ == "__main__":
    app()

# quadwish/cli/cli.py

import typer
from rich.console import Console

from quadwish import __version__
from quadwish.config import get_settings
from quadwish.cli.commands import moment_check, moment_convergence, sgd_compare
from quadwish.log import get_logger, sync_level

logger = get_logger()

console = Console()
app = typer.Typer(
    add_completion=False,
    help=(
        "quadwish – Wishart moments E(QBQ) and SGD noise experiments.\n\n"
        "Common commands:\n"
        "  quadwish moment-convergence --runs 10 --out fig1.csv\n\n"
        "  quadwish sgd-compare --iters 100000 --gamma 0.001\n\n"
        "  quadwish moment-check --n 10 --k 3\n\n"
    ),
    rich_help_panel="🧪  Experiments",
)


@app.callback()
def _startup():
    sync_level()
    logger.debug("quadwish v%s", __version__)


@app.command(rich_help_panel="📦  Misc")
def version():
    """Show current quadwish version."""
    console.print(f"[bold green]QUADWISH v{__version__}[/bold green]")


@app.command(rich_help_panel="📦  Misc")
def config():
    """Print current settings loaded from .env / env vars."""
    settings = get_settings()
    console.print("[bold green]quadwish configuration:[/bold green]")
    for key, val in settings.summary().items():
        console.print(f"[cyan]{key}[/cyan] = {val}")


#  ------ experiments ------------------------------------------------------
app.command("moment-convergence", rich_help_panel="🧪  Experiments")(moment_convergence.moment_convergence)
app.command("sgd-compare",        rich_help_panel="🧪  Experiments")(sgd_compare.sgd_compare)
app.command("moment-check",       rich_help_panel="🧪  Experiments")(moment_check.moment_check)


def main():
    app()

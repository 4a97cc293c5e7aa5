# quadwish/cli/commands/moment_check.py

"""
Cross-check of the closed-form E(QBQ) paths.

Example:
    quadwish moment-check --n 10 --k 3 --runs 10
"""

from pathlib import Path
from typing import Optional

import typer

from quadwish.cli.commands.common import err_console, reporting_errors, resolve_seed
from quadwish.experiments.moment_check import cmd_moment_check
from quadwish.experiments.models import ExperimentConfig, ExperimentKind


def moment_check(
    n: int = typer.Option(10, "--n", help="Dimension of Σ and B."),
    k: int = typer.Option(3, "--k", help="Wishart degrees of freedom."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Unsigned 64-bit seed (default 42)."),
    runs: int = typer.Option(10, "--runs", help="Random instances to check."),
    out: Optional[Path] = typer.Option(None, "--out", help="Report destination (default stdout)."),
    unit: bool = typer.Option(False, "--unit", help="Check Σ = I, B = I instead of random matrices."),
):
    """
    Compare the algebraic, eigen and Kronecker paths and the second moment.

    Exits with code 1 when any run exceeds a relative error of 1e-10.
    """
    with reporting_errors():
        cfg = ExperimentConfig(
            experiment=ExperimentKind.MOMENT_CHECK,
            n=n,
            k=k,
            seeds=ExperimentConfig.seeds_for(resolve_seed(seed), runs),
            output_path=out,
            unit_instance=unit,
        )
        outcomes = cmd_moment_check(cfg)

    failed = [i for i, o in enumerate(outcomes) if not o.passed]
    if failed:
        err_console.print(f"[bold red]❌ moment check failed for runs {failed}[/bold red]")
        raise typer.Exit(1)
    err_console.print(f"[green]✅ all {len(outcomes)} runs agree[/green]")

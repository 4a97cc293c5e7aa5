# quadwish/cli/commands/moment_convergence.py

"""
Monte Carlo convergence of the E(QBQ) estimate.

Example:
    quadwish moment-convergence --n 10 --k 3 --runs 10 --out fig1.csv
"""

from pathlib import Path
from typing import Optional

import typer

from quadwish.cli.commands.common import parse_grid, reporting_errors, resolve_seed
from quadwish.experiments.convergence import cmd_moment_convergence
from quadwish.experiments.models import ExperimentConfig, ExperimentKind
from quadwish.log import get_logger

logger = get_logger()


def moment_convergence(
    n: int = typer.Option(10, "--n", help="Dimension of Σ and B."),
    k: int = typer.Option(3, "--k", help="Wishart degrees of freedom."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Unsigned 64-bit seed (default 42)."),
    runs: int = typer.Option(10, "--runs", help="Independent runs, each with fresh Σ and B."),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV destination (default stdout)."),
    grid: str = typer.Option(
        "1,10,100,1000,10000,100000", "--grid", help="Comma separated sample counts m."
    ),
):
    """
    Relative error of E_empiric against E_exact over a grid of sample counts.

    Writes columns m,mean_rel_err,std_rel_err.
    """
    with reporting_errors():
        cfg = ExperimentConfig(
            experiment=ExperimentKind.MOMENT_CONVERGENCE,
            n=n,
            k=k,
            seeds=ExperimentConfig.seeds_for(resolve_seed(seed), runs),
            sample_grid=parse_grid(grid),
            output_path=out,
        )
        rows = cmd_moment_convergence(cfg)
        logger.info(
            "m=%d: mean relative error %.3e", rows[-1].m, rows[-1].mean_rel_err
        )

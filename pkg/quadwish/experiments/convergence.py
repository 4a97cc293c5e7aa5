# quadwish/experiments/convergence.py

"""
Monte Carlo convergence of E_empiric towards the closed-form E(QBQ).

Each run draws a fresh symmetric B and SPD Σ, takes E_exact from the
eigendecomposition path and grows one sample stream through the grid, so
the estimate at m = 10³ extends the one at m = 10². The table reports the
mean and standard deviation over runs of ‖E_exact - E_empiric‖₂ / ‖E_exact‖₂.
"""

from __future__ import annotations

from typing import List

import numpy as np

from quadwish.errors import ExperimentConfigError
from quadwish.experiments.dispatch import map_runs
from quadwish.experiments.models import ConvergenceRow, ExperimentConfig, ExperimentKind
from quadwish.experiments.output import emit, render_csv
from quadwish.log import get_logger
from quadwish.matgen import random_spd, random_symmetric
from quadwish.moments import QbqAccumulator, expected_qbq_eigen, relative_error
from quadwish.rng import RngSeed
from quadwish.wishart import WishartParams

logger = get_logger()

CONVERGENCE_COLUMNS = ("m", "mean_rel_err", "std_rel_err")


def convergence_run(seed: RngSeed, n: int, k: int, grid: List[int]) -> np.ndarray:
    """Relative errors of one run at every grid point."""
    b = random_symmetric(n, seed.substream(0))
    params = WishartParams(random_spd(n, seed.substream(1)), k)
    exact = expected_qbq_eigen(params, b)

    acc = QbqAccumulator(params, b, seed.substream(2))
    errors = np.empty(len(grid))
    for i, m in enumerate(grid):
        acc.extend_to(m)
        errors[i] = relative_error(exact, acc.estimate(), ord=2)
        logger.debug("[convergence %s] m=%d rel_err=%.3e", seed, m, errors[i])
    return errors


def summarize(errors: np.ndarray, grid: List[int]) -> List[ConvergenceRow]:
    """Collapse a runs × grid error matrix into one row per m."""
    runs = errors.shape[0]
    means = errors.mean(axis=0)
    stds = errors.std(axis=0, ddof=1) if runs > 1 else np.zeros(len(grid))
    return [
        ConvergenceRow(m=int(m), mean_rel_err=float(mu), std_rel_err=float(sd))
        for m, mu, sd in zip(grid, means, stds)
    ]


def run_moment_convergence(cfg: ExperimentConfig) -> List[ConvergenceRow]:
    """Compute the convergence table without writing it."""
    if cfg.experiment is not ExperimentKind.MOMENT_CONVERGENCE:
        raise ExperimentConfigError(f"expected a moment_convergence config, got {cfg.experiment.value}")
    if not cfg.sample_grid:
        raise ExperimentConfigError("sample_grid must not be empty")

    grid = list(cfg.sample_grid)
    logger.info(
        "Moment convergence: n=%d k=%d runs=%d grid=%s", cfg.n, cfg.k, cfg.runs, grid
    )
    per_run = map_runs(
        lambda s: convergence_run(s, cfg.n, cfg.k, grid), cfg.seeds, label="convergence"
    )
    return summarize(np.vstack(per_run), grid)


def cmd_moment_convergence(cfg: ExperimentConfig) -> List[ConvergenceRow]:
    """Run the experiment and write its CSV to ``cfg.output_path`` (stdout if unset)."""
    rows = run_moment_convergence(cfg)
    text = render_csv(cfg.metadata(), CONVERGENCE_COLUMNS, (r.as_dict() for r in rows))
    emit(text, cfg.output_path)
    return rows

# quadwish/experiments/sgd_compare.py

"""
SGD versus averaged SGD on random quadratic objectives.

Per run: Σ a symmetric N(0, 1) matrix shifted to be SPD, A symmetric PSD
with prescribed ‖A‖₂ and cond(A), x^0 a normalized Gaussian vector. Both
methods share the draw stream. With a single run the CSV holds the raw
trajectories; with several runs it holds the per-(method, iter) mean over
runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from quadwish.errors import ExperimentConfigError, InvalidDimensionError
from quadwish.experiments.dispatch import map_runs
from quadwish.experiments.models import ExperimentConfig, ExperimentKind
from quadwish.experiments.output import emit, render_csv
from quadwish.log import get_logger
from quadwish.matgen import random_constrained_psd, random_shifted_spd
from quadwish.quadmodel import QuadraticModel
from quadwish.rng import RngSeed
from quadwish.sgd import RunMethod, RunOutput, SgdConfig, normalized_start, run_asgd, run_sgd

logger = get_logger()

SGD_COLUMNS = ("method", "iter", "grad_norm", "dist_opt", "noise_mean_err", "cov_dist")
METRICS = SGD_COLUMNS[2:]


@dataclass(frozen=True, eq=False)
class ComparisonRun:
    """Both trajectories of one seed."""

    seed: RngSeed
    sgd: RunOutput
    asgd: RunOutput

    def tail_variance(self, method: RunMethod, fraction: float = 0.1) -> float:
        """
        Sample variance of grad_norm over the last ``fraction`` of the records.

        Zero when there is a single record.
        """
        out = self.sgd if method is RunMethod.SGD else self.asgd
        values = out.column("grad_norm")
        if len(values) < 2:
            return 0.0
        tail = values[-max(int(round(len(values) * fraction)), 2):]
        return float(np.var(tail, ddof=1))

    @property
    def asgd_wins(self) -> Dict[str, bool]:
        return {
            "grad_norm": self.asgd.final.grad_norm <= self.sgd.final.grad_norm,
            "dist_opt": self.asgd.final.dist_opt <= self.sgd.final.dist_opt,
            "tail_variance": self.tail_variance(RunMethod.ASGD) < self.tail_variance(RunMethod.SGD),
        }

    @property
    def asgd_wins_all(self) -> bool:
        return all(self.asgd_wins.values())


@dataclass(frozen=True, eq=False)
class ComparisonResult:
    runs: List[ComparisonRun]
    rows: List[dict]

    def win_counts(self) -> Dict[str, int]:
        counts = {"grad_norm": 0, "dist_opt": 0, "tail_variance": 0}
        for run in self.runs:
            for key, won in run.asgd_wins.items():
                counts[key] += int(won)
        return counts

    def all_wins(self) -> int:
        """Runs in which ASGD is ahead on every metric."""
        return sum(run.asgd_wins_all for run in self.runs)


def build_setup(
    seed: RngSeed, n: int, norm: float, cond: float
) -> Tuple[QuadraticModel, np.ndarray]:
    """Model (Σ, A) and starting point of one run."""
    scale = random_shifted_spd(n, seed.substream(0))
    a_mat = random_constrained_psd(n, norm, cond, seed.substream(1))
    x0 = normalized_start(n, seed.substream(2))
    return QuadraticModel(a_mat.entries, scale), x0


def comparison_run(seed: RngSeed, n: int, norm: float, cond: float, sgd_cfg: SgdConfig) -> ComparisonRun:
    model, x0 = build_setup(seed, n, norm, cond)
    cfg = sgd_cfg.model_copy(update={"seed": seed.substream(3)})
    return ComparisonRun(seed=seed, sgd=run_sgd(model, x0, cfg), asgd=run_asgd(model, x0, cfg))


def _rows(runs: List[ComparisonRun]) -> List[dict]:
    rows = []
    for method in (RunMethod.SGD, RunMethod.ASGD):
        outputs = [r.sgd if method is RunMethod.SGD else r.asgd for r in runs]
        iters = [rec.iter for rec in outputs[0].records]
        table = np.stack([[[getattr(rec, m) for m in METRICS] for rec in out.records] for out in outputs])
        means = table.mean(axis=0)
        for it, values in zip(iters, means):
            row = {"method": method.value, "iter": int(it)}
            row.update({m: float(v) for m, v in zip(METRICS, values)})
            rows.append(row)
    return rows


def run_sgd_compare(cfg: ExperimentConfig) -> ComparisonResult:
    """Run both methods for every seed without writing output."""
    if cfg.experiment is not ExperimentKind.SGD_COMPARE:
        raise ExperimentConfigError(f"expected an sgd_compare config, got {cfg.experiment.value}")
    if cfg.sgd is None:
        raise ExperimentConfigError("sgd_compare requires an SGD configuration")
    if cfg.n < 2:
        raise InvalidDimensionError(f"sgd_compare requires n >= 2, got n = {cfg.n}")

    logger.info(
        "SGD comparison: n=%d runs=%d iters=%d gamma=%g cond=%g norm=%g",
        cfg.n, cfg.runs, cfg.sgd.max_iters, cfg.sgd.step_length, cfg.cond, cfg.norm,
    )
    runs = map_runs(
        lambda s: comparison_run(s, cfg.n, cfg.norm, cfg.cond, cfg.sgd),
        cfg.seeds,
        label="sgd-compare",
    )
    return ComparisonResult(runs=runs, rows=_rows(runs))


def cmd_sgd_compare(cfg: ExperimentConfig) -> ComparisonResult:
    """Run the comparison and write its CSV to ``cfg.output_path`` (stdout if unset)."""
    result = run_sgd_compare(cfg)
    emit(render_csv(cfg.metadata(), SGD_COLUMNS, result.rows), cfg.output_path)
    return result

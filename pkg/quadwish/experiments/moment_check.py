# quadwish/experiments/moment_check.py

"""
Self-test: every closed-form path for E(QBQ) must agree.

For each run the algebraic, eigen and Kronecker paths are compared
pairwise, and the second moment E(Q²) is compared with E(QBQ) at B = I.
A run passes when the largest relative Frobenius error is <= 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from quadwish.config import get_settings
from quadwish.errors import ExperimentConfigError
from quadwish.experiments.dispatch import map_runs
from quadwish.experiments.models import ExperimentConfig, ExperimentKind
from quadwish.experiments.output import emit
from quadwish.log import get_logger
from quadwish.matgen import SpdMatrix, SymmetricMatrix, random_spd, random_symmetric
from quadwish.moments import (
    expected_qbq,
    expected_qbq_eigen,
    expected_qbq_kronecker,
    relative_error,
    second_moment,
)
from quadwish.rng import RngSeed
from quadwish.wishart import WishartParams

logger = get_logger()

PASS_THRESHOLD = 1e-10


@dataclass(frozen=True)
class CheckOutcome:
    seed: RngSeed
    errors: Dict[str, float]
    traces: Dict[str, float]

    @property
    def max_error(self) -> float:
        return max(self.errors.values())

    @property
    def passed(self) -> bool:
        return self.max_error <= PASS_THRESHOLD


def check_instance(seed: RngSeed, n: int, k: int, unit: bool = False) -> CheckOutcome:
    """Compare all paths on one (Σ, B) instance."""
    if unit:
        scale, b = SpdMatrix.scaled_identity(n), SymmetricMatrix(np.eye(n))
    else:
        b = random_symmetric(n, seed.substream(0))
        scale = random_spd(n, seed.substream(1))
    params = WishartParams(scale, k)

    values = {
        "algebraic": expected_qbq(params, b).value,
        "eigen": expected_qbq_eigen(params, b).value,
    }
    if n <= get_settings().kronecker_max_dim:
        values["kronecker"] = expected_qbq_kronecker(params, b).value
    else:
        logger.warning("Kronecker path skipped: n=%d above cap", n)

    names = list(values)
    errors = {
        f"{p}_vs_{q}": relative_error(values[p], values[q], ord="fro")
        for i, p in enumerate(names)
        for q in names[i + 1:]
    }
    errors["second_moment"] = relative_error(
        expected_qbq(params, np.eye(n)).value, second_moment(params).value, ord="fro"
    )
    traces = {name: float(np.trace(v)) for name, v in values.items()}
    return CheckOutcome(seed=seed, errors=errors, traces=traces)


def render_report(cfg: ExperimentConfig, outcomes: List[CheckOutcome]) -> str:
    """Plain-text report: metadata, one line per run, summary."""
    lines = [f"# {key}={value}" for key, value in cfg.metadata().items()]
    lines.append(f"# threshold={PASS_THRESHOLD!r}")
    first = outcomes[0]
    for name, tr in first.traces.items():
        lines.append(f"trace[{name}] (run 0) = {tr!r}")
    columns = list(first.errors)
    lines.append("run " + " ".join(columns) + " max_rel_err status")
    for i, out in enumerate(outcomes):
        cells = " ".join(f"{out.errors[c]:.3e}" for c in columns)
        status = "PASS" if out.passed else "FAIL"
        lines.append(f"{i} {cells} {out.max_error:.3e} {status}")
    passed = sum(out.passed for out in outcomes)
    verdict = "PASS" if passed == len(outcomes) else "FAIL"
    lines.append(f"summary: {passed}/{len(outcomes)} PASS, max_rel_err={max(o.max_error for o in outcomes):.3e} {verdict}")
    return "\n".join(lines) + "\n"


def run_moment_check(cfg: ExperimentConfig) -> List[CheckOutcome]:
    if cfg.experiment is not ExperimentKind.MOMENT_CHECK:
        raise ExperimentConfigError(f"expected a moment_check config, got {cfg.experiment.value}")
    logger.info("Moment check: n=%d k=%d runs=%d", cfg.n, cfg.k, cfg.runs)
    return map_runs(
        lambda s: check_instance(s, cfg.n, cfg.k, cfg.unit_instance), cfg.seeds, label="moment-check"
    )


def cmd_moment_check(cfg: ExperimentConfig) -> List[CheckOutcome]:
    """Run the self-test and write the text report."""
    outcomes = run_moment_check(cfg)
    emit(render_report(cfg, outcomes), cfg.output_path)
    return outcomes

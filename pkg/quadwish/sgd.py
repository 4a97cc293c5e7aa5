# quadwish/sgd.py

"""
SGD and averaged SGD (ASGD) on the random quadratic objective.

Both methods drive the same underlying iteration

    x^{k+1} = x^k - γ·∇f_k(x^k)

with one fresh draw per iteration. ASGD reports the running average
x̄^k = x̄^{k-1} + (x^k - x̄^{k-1})/k (x̄^0 = x^0) instead of x^k. With the
same seed both consume identical draws, so their x^k sequences are
bit-identical.

At recorded iterations each run captures ‖∇f‖₂ and ‖x‖₂ at the reported
iterate, the norm of the running mean of the noise (whose exact value is
zero), and ‖Cov(ξ) - Σ‖₂ from the closed-form noise covariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from quadwish.config import get_settings
from quadwish.errors import DivergenceError, InvalidParameterError
from quadwish.log import get_logger
from quadwish.matgen import SpdMatrix
from quadwish.quadmodel import QuadraticModel, noise_covariance, sample_draws
from quadwish.rng import RngLike, RngSeed, as_generator

logger = get_logger()

# (generator, size) -> (a_block, b_block), each (size, n)
Sampler = Callable[[np.random.Generator, int], Tuple[np.ndarray, np.ndarray]]


class RunMethod(str, Enum):
    """Which iterate a run reports."""
    SGD = "sgd"
    ASGD = "asgd"


class SgdConfig(BaseModel):
    """
    Parameters of one SGD/ASGD run.

    Attributes
    ----------
    step_length : float
        Constant step γ. Zero is allowed and freezes the iterate.
    max_iters : int
        Number of iterations k_max.
    record_stride : int
        Record metrics every ``record_stride`` iterations.
    seed : RngSeed
        Stream of the per-iteration draws.
    log_checkpoints_per_decade : int
        Extra log-spaced record points per decade (0 disables them).
    keep_history : bool
        Keep every raw SGD iterate x^1..x^k in the output (tests only).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    step_length: float = Field(ge=0.0)
    max_iters: int = Field(ge=1)
    record_stride: int = Field(default_factory=lambda: get_settings().record_stride, ge=1)
    seed: RngSeed = Field(default_factory=lambda: RngSeed(get_settings().default_seed))
    log_checkpoints_per_decade: int = Field(
        default_factory=lambda: get_settings().log_checkpoints_per_decade, ge=0
    )
    keep_history: bool = False


@dataclass(frozen=True)
class TrajectoryRecord:
    """Metrics of one recorded iteration."""

    iter: int
    grad_norm: float
    dist_opt: float
    noise_mean_err: float
    cov_dist: float


@dataclass(frozen=True, eq=False)
class RunOutput:
    """Recorded trajectory of one run, sorted by iteration."""

    method: RunMethod
    records: List[TrajectoryRecord]
    final_x: np.ndarray
    history: Optional[np.ndarray] = field(default=None, repr=False)

    def column(self, name: str) -> np.ndarray:
        """One metric across all records."""
        return np.array([getattr(r, name) for r in self.records])

    @property
    def final(self) -> TrajectoryRecord:
        return self.records[-1]


# -------------------------------------------------------------------- #
# Helpers
# -------------------------------------------------------------------- #
def record_schedule(cfg: SgdConfig) -> np.ndarray:
    """
    Iterations at which metrics are recorded: multiples of the stride,
    log-spaced checkpoints, and always the final iteration.
    """
    k_max = cfg.max_iters
    points = set(range(cfg.record_stride, k_max + 1, cfg.record_stride))
    points.add(k_max)
    if cfg.log_checkpoints_per_decade > 0:
        decades = math.log10(k_max) if k_max > 1 else 0.0
        num = max(int(math.ceil(decades * cfg.log_checkpoints_per_decade)) + 1, 1)
        points.update(int(p) for p in np.unique(np.rint(np.logspace(0.0, decades, num))))
    return np.array(sorted(p for p in points if 1 <= p <= k_max), dtype=int)


def normalized_start(n: int, rng: RngLike) -> np.ndarray:
    """x^0 with N(0, 1) entries, scaled to unit length."""
    x0 = as_generator(rng).standard_normal(n)
    return x0 / np.linalg.norm(x0)


def noise_metrics(
    model: QuadraticModel,
    x_hist_point: np.ndarray,
    running_noise_mean: np.ndarray,
    scale: SpdMatrix,
) -> Tuple[float, float]:
    """
    (‖E_empiric - 0‖₂, ‖Cov(ξ) at x - Σ‖₂), the covariance taken from the
    closed form rather than estimated.
    """
    mean_err = float(np.linalg.norm(running_noise_mean))
    cov = noise_covariance(model, x_hist_point).cov
    cov_dist = float(np.linalg.norm(cov - np.asarray(scale.entries), 2))
    return mean_err, cov_dist


def _default_sampler(model: QuadraticModel) -> Sampler:
    def _sample(gen: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        return sample_draws(model, size, gen)
    return _sample


# -------------------------------------------------------------------- #
# Runs
# -------------------------------------------------------------------- #
def _run(
    model: QuadraticModel,
    x0: np.ndarray,
    cfg: SgdConfig,
    method: RunMethod,
    sampler: Optional[Sampler],
) -> RunOutput:
    x0 = model.check_point(x0)
    if not np.all(np.isfinite(x0)):
        raise InvalidParameterError("x0 must be finite")

    settings = get_settings()
    threshold_sq = settings.divergence_threshold ** 2
    block = settings.sgd_block
    draw = sampler or _default_sampler(model)
    gen = cfg.seed.generator()

    gamma = cfg.step_length
    hessian = model.cached_hessian
    averaged = method is RunMethod.ASGD
    schedule = record_schedule(cfg)
    next_idx = 0

    x = x0.copy()
    x_bar = x0.copy()
    noise_sum = np.zeros(model.dim)
    records: List[TrajectoryRecord] = []
    history = np.empty((cfg.max_iters, model.dim)) if cfg.keep_history else None

    logger.debug(
        "[%s] start: n=%d gamma=%g iters=%d records=%d seed=%s",
        method.value, model.dim, gamma, cfg.max_iters, len(schedule), cfg.seed,
    )

    k = 0
    while k < cfg.max_iters:
        size = min(block, cfg.max_iters - k)
        a_blk, b_blk = draw(gen, size)
        for i in range(size):
            k += 1
            a = a_blk[i]
            b = b_blk[i]

            # noise of draw k at the reported iterate before this step
            point = x_bar if averaged else x
            noise_sum += a * (a @ point) + b - hessian @ point

            x = x - gamma * (a * (a @ x) + b)
            sq = x @ x
            if not sq <= threshold_sq:
                raise DivergenceError(k, math.sqrt(sq) if np.isfinite(sq) else float("inf"))
            x_bar = x.copy() if k == 1 else x_bar + (x - x_bar) / k
            if history is not None:
                history[k - 1] = x

            if next_idx < len(schedule) and schedule[next_idx] == k:
                reported = x_bar if averaged else x
                mean_err, cov_dist = noise_metrics(model, reported, noise_sum / k, model.scale)
                records.append(
                    TrajectoryRecord(
                        iter=k,
                        grad_norm=float(np.linalg.norm(hessian @ reported)),
                        dist_opt=float(np.linalg.norm(reported)),
                        noise_mean_err=mean_err,
                        cov_dist=cov_dist,
                    )
                )
                next_idx += 1

    final = x_bar if averaged else x
    logger.debug("[%s] done: |x| = %.4e", method.value, float(np.linalg.norm(final)))
    return RunOutput(method=method, records=records, final_x=final.copy(), history=history)


def run_sgd(
    model: QuadraticModel,
    x0: np.ndarray,
    cfg: SgdConfig,
    *,
    sampler: Optional[Sampler] = None,
) -> RunOutput:
    """
    Plain SGD; reports x^k.

    Raises
    ------
    DivergenceError
        If ‖x^k‖ exceeds the configured threshold (default 1e12).
    """
    return _run(model, x0, cfg, RunMethod.SGD, sampler)


def run_asgd(
    model: QuadraticModel,
    x0: np.ndarray,
    cfg: SgdConfig,
    *,
    sampler: Optional[Sampler] = None,
) -> RunOutput:
    """Averaged SGD; same underlying iterates as `run_sgd`, reports x̄^k."""
    return _run(model, x0, cfg, RunMethod.ASGD, sampler)

# quadwish/experiments/models.py

"""
Experiment Models
=================

Validated configuration and row types shared by the experiment runners
and the CLI.

- `ExperimentConfig`  everything one invocation needs (pydantic, validated
                      on construction, frozen afterwards)
- `ConvergenceRow`    one line of the Monte Carlo convergence table

This module contains no I/O.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from quadwish.__version__ import __version__
from quadwish.rng import RngSeed
from quadwish.sgd import SgdConfig


class ExperimentKind(str, Enum):
    MOMENT_CONVERGENCE = "moment_convergence"
    SGD_COMPARE = "sgd_compare"
    MOMENT_CHECK = "moment_check"


DEFAULT_GRID = [1, 10, 100, 1_000, 10_000, 100_000]


class ExperimentConfig(BaseModel):
    """
    Parameters of one experiment invocation.

    Attributes
    ----------
    experiment : ExperimentKind
        Which experiment to run.
    n, k : int
        Dimension and Wishart degrees of freedom.
    seeds : list[RngSeed]
        One stream per run; never empty.
    sample_grid : list[int]
        Monte Carlo sample counts, strictly increasing.
    sgd : SgdConfig, optional
        Step length, iteration count and stride of the SGD comparison.
        Its seed is replaced per run.
    output_path : Path, optional
        Destination file; ``None`` writes to stdout.
    cond, norm : float
        Condition number and spectral norm of A in the SGD comparison.
    unit_instance : bool
        Moment check on Σ = I, B = I instead of random matrices.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    experiment: ExperimentKind
    n: int = Field(default=10, ge=1)
    k: int = Field(default=3, ge=1)
    seeds: List[RngSeed]
    sample_grid: List[int] = Field(default_factory=list)
    sgd: Optional[SgdConfig] = None
    output_path: Optional[Path] = None
    cond: float = Field(default=5.0, ge=1.0)
    norm: float = Field(default=1.0, gt=0.0)
    unit_instance: bool = False

    # ---------------- Validators ---------------- #
    @field_validator("seeds")
    @classmethod
    def _seeds_non_empty(cls, v: List[RngSeed]) -> List[RngSeed]:
        if not v:
            raise ValueError("at least one seed is required")
        return v

    @field_validator("sample_grid")
    @classmethod
    def _grid_increasing(cls, v: List[int]) -> List[int]:
        if any(m < 1 for m in v):
            raise ValueError("sample counts must be >= 1")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("sample_grid must be strictly increasing")
        return v

    # ---------------- Factories ---------------- #
    @staticmethod
    def seeds_for(seed: int, runs: int) -> List[RngSeed]:
        """Run r uses stream r of the user seed."""
        return [RngSeed(seed, stream_id=r) for r in range(runs)]

    @property
    def runs(self) -> int:
        return len(self.seeds)

    def metadata(self) -> Dict[str, Any]:
        """Flat, deterministic description written ahead of the CSV header."""
        meta: Dict[str, Any] = {
            "experiment": self.experiment.value,
            "version": __version__,
            "n": self.n,
            "k": self.k,
            "seed": self.seeds[0].seed,
            "runs": self.runs,
        }
        if self.experiment is ExperimentKind.MOMENT_CONVERGENCE:
            meta["grid"] = ",".join(str(m) for m in self.sample_grid)
            meta["sampling"] = "nested"
            meta["error_norm"] = "spectral"
            meta["error_bars"] = "std"
        if self.experiment is ExperimentKind.SGD_COMPARE and self.sgd is not None:
            meta["iters"] = self.sgd.max_iters
            meta["gamma"] = self.sgd.step_length
            meta["stride"] = self.sgd.record_stride
            meta["cond"] = self.cond
            meta["norm"] = self.norm
            meta["aggregate"] = "raw" if self.runs == 1 else "mean_over_runs"
        if self.experiment is ExperimentKind.MOMENT_CHECK:
            meta["instance"] = "unit" if self.unit_instance else "random"
        return meta


@dataclass(frozen=True)
class ConvergenceRow:
    """Mean and standard deviation over runs of the relative 2-norm error at m samples."""

    m: int
    mean_rel_err: float
    std_rel_err: float

    def as_dict(self) -> Dict[str, Any]:
        return {"m": self.m, "mean_rel_err": self.mean_rel_err, "std_rel_err": self.std_rel_err}

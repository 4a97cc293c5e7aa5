# quadwish/config.py

"""
Central configuration loader for quadwish, powered by:
- dotenv for `.env` injection
- Pydantic for strict validation and schema enforcement

Settings here are the knobs that are not part of a single experiment:
parallelism, sampling chunk sizes, numerical guards and logging.
Experiment parameters travel in `quadwish.experiments.models.ExperimentConfig`.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Annotated, Literal

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# ------------------------------------------------------------------ #
# Constants & environment setup
# ------------------------------------------------------------------ #
ROOT_DIR = Path(".").resolve()
ENV_PATH = ROOT_DIR / ".env"
PROJECT_ENV_PATH = Path(".env")

# Pre-load environment variables from the working directory, falling back
# to the resolved project root.
if not load_dotenv():
    load_dotenv(dotenv_path=ENV_PATH)


class QuadwishSettings(BaseSettings):
    """
    Global quadwish configuration.

    Values are loaded from:
    - Environment variables prefixed with `QUADWISH_`
    - Defaults defined in this class

    Attributes
    ----------
    log_level : {"DEBUG","INFO","WARNING","ERROR"}
        Global log verbosity.
    max_workers : int
        Threads used to dispatch independent runs and Monte Carlo shards.
    kronecker_max_dim : int
        Largest n accepted by the Kronecker path of E(QBQ) (n^4 memory).
    divergence_threshold : float
        SGD aborts once an iterate norm exceeds this value.
    sample_chunk : int
        Wishart matrices drawn per vectorised batch. Monte Carlo results are
        reproducible for a fixed value.
    sgd_block : int
        Stochastic draws generated per block inside an SGD run.
    record_stride : int
        Default metric thinning of SGD runs.
    log_checkpoints_per_decade : int
        Extra log-spaced SGD checkpoints per decade of iterations (0 = off).
    default_seed : int
        Seed used by the CLI when `--seed` is not given.
    """

    model_config = SettingsConfigDict(
        env_file=PROJECT_ENV_PATH if PROJECT_ENV_PATH.exists() else ENV_PATH,
        env_prefix="QUADWISH_",
        extra="ignore",
    )

    # ---------------- Core ---------------- #
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "WARNING"

    max_workers: Annotated[
        int,
        Field(ge=1, description="Threads for independent runs and Monte Carlo shards"),
    ] = 4

    # ---------------- Numerics ---------------- #
    kronecker_max_dim: Annotated[int, Field(ge=1)] = 50
    divergence_threshold: Annotated[float, Field(gt=0)] = 1e12

    # ---------------- Sampling ---------------- #
    sample_chunk: Annotated[int, Field(ge=1)] = 4096
    sgd_block: Annotated[int, Field(ge=1)] = 4096

    # ---------------- SGD metrics ---------------- #
    record_stride: Annotated[int, Field(ge=1)] = 1000
    log_checkpoints_per_decade: Annotated[int, Field(ge=0)] = 10

    default_seed: Annotated[int, Field(ge=0, lt=2**64)] = 42

    # ---------------- Developer helpers ---------------- #
    def summary(self) -> dict:
        """
        Return a dict of high-level config values for quick display.
        """
        return {
            "log_level": self.log_level,
            "workers": self.max_workers,
            "kronecker_max_dim": self.kronecker_max_dim,
            "divergence_threshold": self.divergence_threshold,
            "sample_chunk": self.sample_chunk,
            "sgd_block": self.sgd_block,
            "record_stride": self.record_stride,
            "log_checkpoints": self.log_checkpoints_per_decade,
            "default_seed": self.default_seed,
        }

    def display(self) -> None:
        """
        Pretty-print the current configuration to the central logger.
        """
        from quadwish.log import get_logger
        logger = get_logger()
        logger.info("quadwish configuration:")
        for k, v in self.summary().items():
            logger.info(f"{k:22} = {v}")


# ------------------------------------------------------------------ #
# Singleton accessor
# ------------------------------------------------------------------ #
_settings: QuadwishSettings | None = None
_settings_lock = threading.Lock()


def get_settings(force_reload: bool = False) -> QuadwishSettings:
    """
    Return the global settings singleton.

    Parameters
    ----------
    force_reload : bool, default False
        Forces re-loading of settings, useful for testing.
    """
    global _settings
    if _settings is None or force_reload:
        with _settings_lock:
            if _settings is None or force_reload:
                _settings = QuadwishSettings()
    return _settings


def override_settings(**kwargs) -> None:
    """
    Mutate the global settings singleton. Intended for tests.

    Raises
    ------
    AttributeError
        If a key is not a known setting.
    """
    s = get_settings()
    for key, value in kwargs.items():
        if key in QuadwishSettings.model_fields:
            setattr(s, key, value)
        else:
            raise AttributeError(f"Invalid config key: '{key}'")

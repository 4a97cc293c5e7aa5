# tests/conftest.py

import os

import pytest
from hypothesis import HealthCheck, settings

from quadwish.config import get_settings
from quadwish.log import sync_level
from quadwish.matgen import random_spd, random_symmetric
from quadwish.rng import RngSeed
from quadwish.wishart import WishartParams

settings.register_profile(
    "quadwish",
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile("quadwish")


def pytest_collection_modifyitems(config, items):
    # 10⁶- and 10⁷-sample Monte Carlo runs only on request
    if os.environ.get("QUADWISH_LONG_TESTS") == "1":
        return
    skip_long = pytest.mark.skip(reason="set QUADWISH_LONG_TESTS=1 to run")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip_long)


@pytest.fixture(autouse=True)
def quadwish_isolate():
    # ── SET‑UP ──────────────────────────────────────────────────────────
    get_settings(force_reload=True)
    sync_level()

    yield

    # ── TEAR‑DOWN ───────────────────────────────────────────────────────
    get_settings(force_reload=True)
    sync_level()


@pytest.fixture
def seed():
    return RngSeed(20240611)


@pytest.fixture
def params(seed):
    """Random W_4(Σ, 3)."""
    return WishartParams(random_spd(4, seed.substream(0)), 3)


@pytest.fixture
def b_sym(seed):
    return random_symmetric(4, seed.substream(1))

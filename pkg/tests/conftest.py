"""Shared fixtures for the test suite."""

import random

import pytest

from src.core.config import BudgetConfig, reload_config

ENV_VARS = (
    "FRACTAL_GROUPS_BUDGET",
    "FRACTAL_GROUPS_MAX_GENERATIONS",
    "FRACTAL_GROUPS_OUTPUT_DIR",
    "FRACTAL_GROUPS_LOG_LEVEL",
)


@pytest.fixture
def rng():
    return random.Random(20240501)


@pytest.fixture
def small_budget():
    return BudgetConfig(radius=2, cap=2, samples=4, depth=2, generations=3)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """Environment with no project variables and output under tmp_path."""
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("FRACTAL_GROUPS_OUTPUT_DIR", str(tmp_path))
    yield reload_config()
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    reload_config()

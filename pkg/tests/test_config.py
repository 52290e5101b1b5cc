"""
Configuration Tests
===================
"""

import pytest

from src.core.config import AppConfig, BudgetConfig, LaminationConfig, RenderConfig, get_config, parse_budget, reload_config
from src.core.errors import ConfigurationError


def test_defaults(clean_env):
    config = AppConfig()
    assert config.budget == BudgetConfig(radius=4, cap=4, samples=40, depth=3, generations=6)
    assert config.render.width == 600
    assert config.render.max_iter == 400
    assert config.lamination.max_generations == 10
    assert config.log_level == "INFO"


def test_budget_override():
    budget = BudgetConfig().override("radius=5, cap=6")
    assert (budget.radius, budget.cap, budget.samples) == (5, 6, 40)
    assert BudgetConfig().override(None) == BudgetConfig()
    assert BudgetConfig().override("") == BudgetConfig()


@pytest.mark.parametrize("text", ["width=3", "radius", "radius=five", "cap=1", "samples=0"])
def test_bad_budget(text):
    with pytest.raises(ConfigurationError):
        BudgetConfig().override(text)


def test_parse_budget_skips_empty_items():
    assert parse_budget("depth=2,,generations=1,") == {"depth": 2, "generations": 1}


def test_invalid_sections():
    with pytest.raises(ConfigurationError):
        RenderConfig(escape_radius=1.0)
    with pytest.raises(ConfigurationError):
        RenderConfig(width=0)
    with pytest.raises(ConfigurationError):
        LaminationConfig(max_generations=-1)


def test_environment(clean_env, monkeypatch, tmp_path):
    assert clean_env.output_dir == str(tmp_path)
    monkeypatch.setenv("FRACTAL_GROUPS_BUDGET", "radius=2,samples=7")
    monkeypatch.setenv("FRACTAL_GROUPS_MAX_GENERATIONS", "4")
    monkeypatch.setenv("FRACTAL_GROUPS_LOG_LEVEL", "debug")
    config = reload_config()
    assert config.budget.radius == 2
    assert config.budget.samples == 7
    assert config.lamination.max_generations == 4
    assert config.log_level == "DEBUG"
    assert get_config() is config


@pytest.mark.parametrize("name, value", [
    ("FRACTAL_GROUPS_MAX_GENERATIONS", "many"),
    ("FRACTAL_GROUPS_BUDGET", "radius=x"),
])
def test_environment_errors(clean_env, monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigurationError):
        reload_config()

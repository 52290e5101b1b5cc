"""
Configuration Management
=======================

Centralized configuration with validation, type hints, and environment support.
Budgets for the verification suites come from FRACTAL_GROUPS_BUDGET or --budget.
"""

import os
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

from dotenv import load_dotenv

from .errors import ConfigurationError

load_dotenv()

BUDGET_ENV = "FRACTAL_GROUPS_BUDGET"


@dataclass(frozen=True)
class BudgetConfig:
    """Sizes used by the verification suites."""
    radius: int = 4
    cap: int = 4
    samples: int = 40
    depth: int = 3
    generations: int = 6

    def __post_init__(self):
        """Validate every budget is in range."""
        if self.radius < 0:
            raise ConfigurationError(f"radius must be >= 0, got {self.radius}")
        if self.cap < 2:
            raise ConfigurationError(f"cap must be >= 2, got {self.cap}")
        if self.samples < 1:
            raise ConfigurationError(f"samples must be >= 1, got {self.samples}")
        if self.depth < 0:
            raise ConfigurationError(f"depth must be >= 0, got {self.depth}")
        if self.generations < 0:
            raise ConfigurationError(f"generations must be >= 0, got {self.generations}")

    def override(self, text: Optional[str]) -> 'BudgetConfig':
        """Return a copy with the entries of a ``key=value,...`` string applied.

        Args:
            text: Budget string such as ``"radius=5,cap=5"``; empty or None is a no-op

        Returns:
            BudgetConfig: Updated budget

        Raises:
            ConfigurationError: On unknown keys or non-integer values
        """
        return replace(self, **parse_budget(text))


def parse_budget(text: Optional[str]) -> Dict[str, int]:
    """Parse a ``key=value`` comma list into budget overrides."""
    values: Dict[str, int] = {}
    if not text:
        return values
    allowed = set(BudgetConfig.__dataclass_fields__)
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or key not in allowed:
            raise ConfigurationError(f"Bad budget entry '{item}' (known keys: {sorted(allowed)})")
        try:
            values[key] = int(raw.strip())
        except ValueError:
            raise ConfigurationError(f"Budget value for '{key}' must be an integer, got '{raw}'")
    return values


@dataclass(frozen=True)
class RenderConfig:
    """Julia rendering defaults."""
    width: int = 600
    height: int = 450
    max_iter: int = 400
    escape_radius: float = 2.0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be >= 1")
        if self.escape_radius < 2:
            raise ConfigurationError("escape_radius must be >= 2")
        if self.width < 1 or self.height < 1:
            raise ConfigurationError("image size must be positive")


@dataclass(frozen=True)
class LaminationConfig:
    """Lamination generation limits."""
    max_generations: int = 10

    def __post_init__(self):
        if self.max_generations < 0:
            raise ConfigurationError("max_generations must be >= 0")


@dataclass(frozen=True)
class AppConfig:
    """Main application configuration.

    Aggregates every configuration concern and validates on construction.
    """
    budget: BudgetConfig = field(default_factory=BudgetConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    lamination: LaminationConfig = field(default_factory=LaminationConfig)
    output_dir: str = "output"
    log_level: str = "INFO"

    @classmethod
    def from_environment(cls) -> 'AppConfig':
        """Create configuration from environment variables (and a .env file).

        Returns:
            AppConfig: Validated configuration instance

        Raises:
            ConfigurationError: If a variable cannot be parsed
        """
        try:
            max_generations = int(os.getenv("FRACTAL_GROUPS_MAX_GENERATIONS", "10"))
        except ValueError:
            raise ConfigurationError("FRACTAL_GROUPS_MAX_GENERATIONS must be an integer")

        return cls(
            budget=BudgetConfig().override(os.getenv(BUDGET_ENV)),
            render=RenderConfig(),
            lamination=LaminationConfig(max_generations=max_generations),
            output_dir=os.getenv("FRACTAL_GROUPS_OUTPUT_DIR", "output"),
            log_level=os.getenv("FRACTAL_GROUPS_LOG_LEVEL", "INFO").upper(),
        )


# Global configuration instance (singleton pattern)
_config_instance: Optional[AppConfig] = None


def get_config() -> AppConfig:
    """Get the global configuration instance.

    Returns:
        AppConfig: The global configuration instance
    """
    global _config_instance

    if _config_instance is None:
        _config_instance = AppConfig.from_environment()

    return _config_instance


def reload_config() -> AppConfig:
    """Force reload of configuration (useful for testing).

    Returns:
        AppConfig: Newly loaded configuration instance
    """
    global _config_instance
    _config_instance = None
    return get_config()

"""
Logging Setup
=============

One entry point that configures root logging for the CLI.
"""

import logging
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None) -> None:
    """Configure root logging once; later calls only adjust the level.

    Args:
        level: Level name such as ``INFO``; defaults to the configured log level
    """
    if level is None:
        from ..core.config import get_config
        level = get_config().log_level
    numeric = getattr(logging, level.upper(), None)
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level '{level}'")
    root = logging.getLogger()
    if root.handlers:
        root.setLevel(numeric)
        return
    logging.basicConfig(level=numeric, format=LOG_FORMAT)

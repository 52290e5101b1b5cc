"""
Artifact Storage
================

Writes exported structures (JSON, DOT, SVG, CSV, PNG) under an output
directory and reads JSON inputs back. I/O failures are logged and re-raised
as OSError with the offending path.
"""

import json
import logging
from pathlib import Path
from typing import Any, Union

from PIL import Image

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ArtifactStorage:
    """File-based storage for generated artifacts.

    Relative names resolve against ``base_dir``; absolute paths are used as given.
    """

    def __init__(self, base_dir: PathLike = "output"):
        """Initialize storage.

        Args:
            base_dir: Directory that receives relative artifact names
        """
        self.base_dir = Path(base_dir)

    def resolve(self, name: PathLike) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.base_dir / path

    def _prepare(self, name: PathLike) -> Path:
        path = self.resolve(name)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            logger.error(f"Cannot create directory {path.parent}: {e}")
            raise OSError(f"Cannot create directory {path.parent}: {e}") from e
        return path

    def write_text(self, name: PathLike, text: str) -> Path:
        """Write a text artifact (DOT, SVG, CSV).

        Returns:
            Path: The written file
        """
        path = self._prepare(name)
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            logger.error(f"Failed to write {path}: {e}")
            raise OSError(f"Failed to write {path}: {e}") from e
        logger.info(f"Wrote {path}")
        return path

    def write_json(self, name: PathLike, data: Any) -> Path:
        return self.write_text(name, json.dumps(data, indent=2, ensure_ascii=False) + "\n")

    def write_png(self, name: PathLike, image: Image.Image) -> Path:
        path = self._prepare(name)
        try:
            image.save(path, format="PNG")
        except OSError as e:
            logger.error(f"Failed to write {path}: {e}")
            raise OSError(f"Failed to write {path}: {e}") from e
        logger.info(f"Wrote {path} ({image.width}x{image.height})")
        return path


def read_json(path: PathLike) -> Any:
    """Load a JSON document.

    Raises:
        OSError: If the file cannot be read
        ValueError: If the content is not valid JSON
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"{path} is not valid JSON: {e}") from e
    except OSError as e:
        logger.error(f"Failed to read {path}: {e}")
        raise

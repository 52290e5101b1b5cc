"""
Artifact Storage Tests
======================
"""

import pytest
from PIL import Image

from src.utils.storage import ArtifactStorage, read_json


def test_relative_names_resolve_under_base(tmp_path):
    storage = ArtifactStorage(tmp_path / "out")
    path = storage.write_text("nested/graph.dot", "digraph g {}\n")
    assert path == tmp_path / "out" / "nested" / "graph.dot"
    assert path.read_text() == "digraph g {}\n"


def test_absolute_names_are_kept(tmp_path):
    target = tmp_path / "elsewhere" / "a.svg"
    assert ArtifactStorage(tmp_path / "out").resolve(target) == target


def test_json_round_trip(tmp_path):
    data = {"leaves": [["1/3", "2/3"]], "generation": 1}
    path = ArtifactStorage(tmp_path).write_json("lam.json", data)
    assert read_json(path) == data


def test_png(tmp_path):
    image = Image.new("L", (4, 3), color=255)
    path = ArtifactStorage(tmp_path).write_png("j.png", image)
    with Image.open(path) as loaded:
        assert loaded.size == (4, 3)


def test_read_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ValueError):
        read_json(bad)
    with pytest.raises(OSError):
        read_json(tmp_path / "missing.json")

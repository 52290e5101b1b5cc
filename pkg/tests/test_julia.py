"""Tests for escape-time rendering and the parabolic parameter presets."""

from fractions import Fraction

import numpy as np
import pytest

from src.core.config import RenderConfig
from src.core.errors import NoConvergence
from src.core.julia import (
    JuliaParams,
    escape_times,
    find_parabolic_parameter,
    parabolic_residual,
    parse_complex,
    preset,
    render,
    to_image,
)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            JuliaParams(0j, max_iter=0)
        with pytest.raises(ValueError):
            JuliaParams(0j, escape_radius=1.5)
        with pytest.raises(ValueError):
            JuliaParams(0j, width=0)
        with pytest.raises(ValueError):
            JuliaParams(0j, viewport=(1.0, -1.0, -1.0, 1.0))

    def test_from_config(self):
        params = JuliaParams.from_config(-1 + 0j, RenderConfig(width=40, height=30, max_iter=50))
        assert (params.width, params.height, params.max_iter) == (40, 30, 50)
        assert params.to_json()["c"] == ["-1.0", "0.0"]

    def test_parse_complex(self):
        assert parse_complex("-0.75") == complex(-0.75, 0)
        assert parse_complex("0.25", "-1") == complex(0.25, -1)
        with pytest.raises(ValueError):
            parse_complex("a", "b")


class TestEscapeTime:
    def test_known_pixels(self):
        # grid points -2..2 by 1 on the real axis, rows at 1.5, 0, -1.5
        params = JuliaParams(-1 + 0j, max_iter=50, width=5, height=3)
        times = escape_times(params)
        assert times.shape == (3, 5)
        assert times[0, 0] == 0
        assert times[1, 2] == -1

    def test_render_and_image(self):
        params = JuliaParams(-1 + 0j, max_iter=50, width=5, height=3)
        pixels = render(params)
        assert pixels.dtype == np.uint8
        assert pixels[1, 2] == 0
        assert pixels[0, 0] == 255
        assert to_image(pixels).size == (5, 3)


class TestPresets:
    def test_basilica(self):
        chosen = preset("basilica")
        assert chosen.name == "basilica"
        assert abs(chosen.c - (-0.75)) < 1e-9

    def test_rabbit(self):
        chosen = preset("rabbit:3")
        assert abs(chosen.c - complex(-0.125, 0.649519052838329)) < 1e-9
        assert parabolic_residual(chosen.c, chosen.parameter.z, 3) < 1e-9

    def test_airplane(self):
        chosen = preset("airplane")
        assert abs(chosen.c - (-1.75)) < 1e-6
        assert chosen.parameter.period == 3
        assert parabolic_residual(chosen.c, chosen.parameter.z, 3) < 1e-10
        assert chosen.to_json()["provenance"]["method"] == "newton"

    @pytest.mark.parametrize("name", ["mandelbrot", "rabbit:1"])
    def test_unknown_presets(self, name):
        with pytest.raises(ValueError):
            preset(name)

    def test_solver_errors(self):
        with pytest.raises(ValueError):
            find_parabolic_parameter(0, Fraction(0), guess=0j)
        with pytest.raises(NoConvergence):
            find_parabolic_parameter(1, Fraction(1, 2), guess=1 + 1j)

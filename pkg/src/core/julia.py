"""
Julia Set Rendering
===================

Escape-time images of the filled Julia set of f_c(z) = z^2 + c, and the
parabolic-cycle oracle that computes the preset parameters.

Floating point stays in this module; every other module is exact.
"""

import cmath
import functools
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np
from PIL import Image

from .config import RenderConfig
from .errors import NoConvergence

logger = logging.getLogger(__name__)

Viewport = Tuple[float, float, float, float]
DEFAULT_VIEWPORT: Viewport = (-2.0, 2.0, -1.5, 1.5)


@dataclass(frozen=True)
class JuliaParams:
    """Parameters of one escape-time rendering.

    ``viewport`` is (xmin, xmax, ymin, ymax); row 0 of the image is ymax.
    """
    c: complex
    max_iter: int = 400
    escape_radius: float = 2.0
    width: int = 600
    height: int = 450
    viewport: Viewport = DEFAULT_VIEWPORT

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.escape_radius < 2:
            raise ValueError(f"escape_radius must be >= 2, got {self.escape_radius}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Image size must be positive, got {self.width}x{self.height}")
        xmin, xmax, ymin, ymax = self.viewport
        if xmin >= xmax or ymin >= ymax:
            raise ValueError(f"Empty viewport {self.viewport}")

    @classmethod
    def from_config(cls, c: complex, render: RenderConfig, viewport: Viewport = DEFAULT_VIEWPORT) -> 'JuliaParams':
        return cls(c, render.max_iter, render.escape_radius, render.width, render.height, viewport)

    def to_json(self) -> Dict[str, object]:
        return {
            "c": [repr(self.c.real), repr(self.c.imag)],
            "max_iter": self.max_iter,
            "escape_radius": self.escape_radius,
            "width": self.width,
            "height": self.height,
            "viewport": list(self.viewport),
        }


def parse_complex(real: str, imag: str = "0") -> complex:
    """Complex number from a pair of decimal strings."""
    try:
        return complex(float(real), float(imag))
    except ValueError:
        raise ValueError(f"Invalid complex parameter ({real!r}, {imag!r})")


# =============================================================================
# ESCAPE TIME
# =============================================================================

def complex_grid(params: JuliaParams) -> np.ndarray:
    xmin, xmax, ymin, ymax = params.viewport
    re = np.linspace(xmin, xmax, params.width)
    im = np.linspace(ymax, ymin, params.height)
    return re[np.newaxis, :] + 1j * im[:, np.newaxis]


def escape_times(params: JuliaParams) -> np.ndarray:
    """First k with |f_c^k(z)| > escape_radius per pixel, -1 where the orbit stays bounded."""
    z = complex_grid(params)
    times = np.full(z.shape, -1, dtype=np.int32)
    alive = np.ones(z.shape, dtype=bool)
    radius = params.escape_radius
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(params.max_iter + 1):
            escaped = alive & (np.abs(z) > radius)
            times[escaped] = k
            alive &= ~escaped
            if k < params.max_iter:
                z[alive] = z[alive] ** 2 + params.c
    logger.debug(f"Escape times for c={params.c}: {int(alive.sum())} of {alive.size} pixels bounded")
    return times


def render(params: JuliaParams) -> np.ndarray:
    """Greyscale pixels: 0 for bounded orbits, lighter for faster escape."""
    times = escape_times(params)
    shade = 255 - (200 * np.clip(times, 0, None)) // params.max_iter
    return np.where(times < 0, 0, shade).astype(np.uint8)


def to_image(pixels: np.ndarray) -> Image.Image:
    return Image.fromarray(pixels)


# =============================================================================
# PARABOLIC PARAMETERS
# =============================================================================

@dataclass(frozen=True)
class ParabolicParameter:
    """Solution of f_c^p(z) = z with (f_c^p)'(z) = exp(2 pi i angle)."""
    c: complex
    z: complex
    period: int
    angle: Fraction
    residual: float
    steps: int
    method: str = "newton"

    def provenance(self) -> Dict[str, object]:
        return {
            "method": self.method,
            "period": self.period,
            "angle": str(self.angle),
            "residual": self.residual,
            "steps": self.steps,
            "cycle_point": [self.z.real, self.z.imag],
        }


def _cycle(z: complex, c: complex, period: int) -> Tuple[complex, ...]:
    """f^p(z), its z and c derivatives, the multiplier and its z and c derivatives."""
    w, dw_dz, dw_dc = z, 1 + 0j, 0j
    lam, dlam_dz, dlam_dc = 1 + 0j, 0j, 0j
    for _ in range(period):
        dlam_dz = 2 * w * dlam_dz + 2 * lam * dw_dz
        dlam_dc = 2 * w * dlam_dc + 2 * lam * dw_dc
        lam = 2 * w * lam
        dw_dz, dw_dc = 2 * w * dw_dz, 2 * w * dw_dc + 1
        w = w * w + c
    return w, dw_dz, dw_dc, lam, dlam_dz, dlam_dc


def parabolic_residual(c: complex, z: complex, period: int) -> float:
    """max(|f^p(z) - z|, |(f^p)'(z) - 1|); zero iff z lies on a parabolic cycle of multiplier 1."""
    w, _, _, lam, _, _ = _cycle(z, c, period)
    return max(abs(w - z), abs(lam - 1))


def _critical_orbit_point(c: complex, period: int, steps: int = 2000) -> complex:
    z = 0j
    for _ in range(steps * period):
        z = z * z + c
        if abs(z) > 2:
            raise NoConvergence(f"Critical orbit of c={c} escapes; cannot seed the cycle search")
    return z


def find_parabolic_parameter(
    period: int,
    angle: Fraction,
    guess: complex,
    z_guess: Optional[complex] = None,
    tol: float = 1e-12,
    max_steps: int = 100,
) -> ParabolicParameter:
    """Newton iteration in (z, c) for a cycle of the given period and multiplier angle.

    Args:
        period: Cycle period p >= 1
        angle: Multiplier is exp(2 pi i angle)
        guess: Starting parameter, ideally inside the adjacent hyperbolic component
        z_guess: Starting cycle point; defaults to the critical orbit of ``guess``

    Raises:
        NoConvergence: If Newton does not reach ``tol`` within ``max_steps``
    """
    if period < 1:
        raise ValueError(f"period must be >= 1, got {period}")
    target = cmath.exp(2j * cmath.pi * float(angle))
    c = complex(guess)
    z = _critical_orbit_point(c, period) if z_guess is None else complex(z_guess)

    for step in range(1, max_steps + 1):
        w, dw_dz, dw_dc, lam, dlam_dz, dlam_dc = _cycle(z, c, period)
        residual = np.array([w - z, lam - target])
        jacobian = np.array([[dw_dz - 1, dw_dc], [dlam_dz, dlam_dc]])
        try:
            dz, dc = np.linalg.solve(jacobian, -residual)
        except np.linalg.LinAlgError as e:
            raise NoConvergence(f"Singular Newton step at c={c}, z={z}: {e}")
        z, c = complex(z + dz), complex(c + dc)
        w, _, _, lam, _, _ = _cycle(z, c, period)
        error = max(abs(w - z), abs(lam - target))
        if error < tol:
            logger.debug(f"Parabolic parameter c={c} found in {step} steps (residual {error:.2e})")
            return ParabolicParameter(c, z, period, Fraction(angle), float(error), step)

    raise NoConvergence(f"Newton did not converge for period {period}, angle {angle} from {guess}")


# =============================================================================
# PRESETS
# =============================================================================

@dataclass(frozen=True)
class JuliaPreset:
    name: str
    parameter: ParabolicParameter
    viewport: Viewport = field(default=DEFAULT_VIEWPORT)

    @property
    def c(self) -> complex:
        return self.parameter.c

    def to_json(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "c": [repr(self.c.real), repr(self.c.imag)],
            "provenance": self.parameter.provenance(),
        }


def _cardioid_point(angle: Fraction, radius: float) -> complex:
    lam = radius * cmath.exp(2j * cmath.pi * float(angle))
    return lam / 2 - lam * lam / 4


_RABBIT = re.compile(r"^rabbit:?(\d+)$")


@functools.lru_cache(maxsize=None)
def preset(name: str) -> JuliaPreset:
    """Preset parameter computed by the parabolic-cycle oracle.

    ``rabbit:n`` is the root where the fixed point has multiplier exp(2 pi i / n),
    so f_c^n has a parabolic cycle; ``basilica`` is rabbit:2 (c = -3/4);
    ``airplane`` is the root of the real period-3 component (c = -7/4).

    Raises:
        ValueError: On an unknown preset name
    """
    key = name.strip().lower()
    if key == "airplane":
        parameter = find_parabolic_parameter(3, Fraction(0), guess=-1.752 + 0j)
        return JuliaPreset("airplane", parameter, (-2.0, 2.0, -1.5, 1.5))
    if key == "basilica":
        key = "rabbit:2"
    match = _RABBIT.match(key)
    if match and int(match.group(1)) >= 2:
        n = int(match.group(1))
        angle = Fraction(1, n)
        parameter = find_parabolic_parameter(1, angle, guess=_cardioid_point(angle, 0.9))
        label = "basilica" if n == 2 else f"rabbit:{n}"
        return JuliaPreset(label, parameter)
    raise ValueError(f"Unknown Julia preset '{name}' (use basilica, airplane or rabbit:n)")

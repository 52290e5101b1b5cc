"""
SVG Output
==========

Small string builders for the line drawings the CLI emits: replacement-graph
expansions and lamination chord diagrams.
"""

from typing import Iterable
from xml.sax.saxutils import escape


def svg_document(width: int, height: int, elements: Iterable[str], background: str = "white") -> str:
    """Wrap rendered elements in an ``<svg>`` root of the given size."""
    body = "\n".join(f"  {element}" for element in elements)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'  <rect width="{width}" height="{height}" fill="{background}"/>\n'
        f"{body}\n</svg>\n"
    )


def svg_line(x1: float, y1: float, x2: float, y2: float, stroke: str = "black", width: float = 1.0) -> str:
    return (
        f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
        f'stroke="{escape(stroke)}" stroke-width="{width}"/>'
    )


def svg_point(x: float, y: float, radius: float = 2.0, fill: str = "black") -> str:
    return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" fill="{escape(fill)}"/>'


def svg_circle(x: float, y: float, radius: float, stroke: str = "black", width: float = 1.0) -> str:
    return (
        f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius:.2f}" fill="none" '
        f'stroke="{escape(stroke)}" stroke-width="{width}"/>'
    )


def svg_polygon(points: Iterable[tuple], fill: str = "#cccccc", stroke: str = "black", width: float = 0.5) -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    return (
        f'<polygon points="{coords}" fill="{escape(fill)}" '
        f'stroke="{escape(stroke)}" stroke-width="{width}"/>'
    )


def svg_text(x: float, y: float, text: str, size: int = 10, fill: str = "black") -> str:
    return (
        f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" fill="{escape(fill)}" '
        f'font-family="monospace">{escape(str(text))}</text>'
    )

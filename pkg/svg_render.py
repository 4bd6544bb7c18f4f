"""
Poincaré-disk SVG rendering of marked tessellations.

Points of the rational circle go to the unit circle through the Cayley
map; each edge is drawn as the circular arc orthogonal to the unit circle
(a diameter for antipodal endpoints). Floats appear only here.
"""

import logging
import math
import xml.etree.ElementTree as etree
from dataclasses import dataclass
from typing import Tuple

from farey import farey_edges_to_depth
from modular_arithmetic import Edge, ExtRational, cayley_point
from tessellation_state import MarkedTessellation

logger = logging.getLogger(__name__)

MAX_RENDER_DEPTH = 12
SVG_NS = "http://www.w3.org/2000/svg"

Point = Tuple[float, float]


@dataclass(frozen=True)
class RenderSpec:
    """Canvas size in pixels, base stroke width and Farey backdrop depth."""

    size: int = 512
    stroke_width: float = 1.0
    depth: int = 4

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("'size' must be positive")
        if self.stroke_width <= 0:
            raise ValueError("'stroke_width' must be positive")
        if not 0 <= self.depth <= MAX_RENDER_DEPTH:
            raise ValueError(f"'depth' must be between 0 and {MAX_RENDER_DEPTH}")


def _fmt(value: float) -> str:
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


def disk_point(x: ExtRational) -> Point:
    re, im = cayley_point(x)
    return float(re), float(im)


class _Canvas:
    def __init__(self, spec: RenderSpec):
        self.spec = spec
        self.center = spec.size / 2
        self.radius = spec.size / 2 - 8 * spec.stroke_width

    def screen(self, p: Point) -> Point:
        return self.center + self.radius * p[0], self.center - self.radius * p[1]

    def geodesic(self, edge: Edge) -> Tuple[str, Point]:
        """SVG path data for the geodesic between two ideal points, plus its midpoint."""
        z1, z2 = disk_point(edge[0]), disk_point(edge[1])
        s1, s2 = self.screen(z1), self.screen(z2)
        move = f"M {_fmt(s1[0])} {_fmt(s1[1])}"
        cos_delta = z1[0] * z2[0] + z1[1] * z2[1]
        if 1 + cos_delta < 1e-12:
            return f"{move} L {_fmt(s2[0])} {_fmt(s2[1])}", self.screen((0.0, 0.0))
        c = ((z1[0] + z2[0]) / (1 + cos_delta), (z1[1] + z2[1]) / (1 + cos_delta))
        delta = math.acos(max(-1.0, min(1.0, cos_delta)))
        r = abs(math.tan(delta / 2))
        norm = math.hypot(c[0], c[1])
        mid = (c[0] - r * c[0] / norm, c[1] - r * c[1] / norm)
        sc = self.screen(c)
        cross = (s1[0] - sc[0]) * (s2[1] - sc[1]) - (s1[1] - sc[1]) * (s2[0] - sc[0])
        sweep = 1 if cross > 0 else 0
        rr = _fmt(r * self.radius)
        return f"{move} A {rr} {rr} 0 0 {sweep} {_fmt(s2[0])} {_fmt(s2[1])}", self.screen(mid)


def _sorted_edges(edges):
    return sorted(edges, key=lambda e: (e[0].sort_key(), e[1].sort_key()))


def render_svg(s: MarkedTessellation, spec: RenderSpec = RenderSpec()) -> str:
    """
    Draw the unit circle, the Farey backdrop, the edges of P, the doe as an
    arrow and marked edges as small boxes.

    Args:
        s: State to draw
        spec: Canvas settings

    Returns:
        The SVG document as a string
    """
    canvas = _Canvas(spec)
    width = spec.stroke_width
    size = str(spec.size)
    root = etree.Element(
        "svg",
        {"xmlns": SVG_NS, "width": size, "height": size, "viewBox": f"0 0 {size} {size}"},
    )
    defs = etree.SubElement(root, "defs")
    marker = etree.SubElement(
        defs,
        "marker",
        {
            "id": "arrow",
            "viewBox": "0 0 10 10",
            "refX": "10",
            "refY": "5",
            "markerWidth": "6",
            "markerHeight": "6",
            "orient": "auto",
        },
    )
    etree.SubElement(marker, "path", {"d": "M 0 0 L 10 5 L 0 10 z", "fill": "crimson"})

    etree.SubElement(
        root,
        "circle",
        {
            "cx": _fmt(canvas.center),
            "cy": _fmt(canvas.center),
            "r": _fmt(canvas.radius),
            "fill": "none",
            "stroke": "black",
            "stroke-width": _fmt(width),
        },
    )

    backdrop = etree.SubElement(root, "g", {"id": "farey", "stroke": "silver", "fill": "none", "stroke-width": _fmt(width / 2)})
    current = set(s.edges)
    for edge in _sorted_edges(farey_edges_to_depth(spec.depth).edges - current):
        path, _ = canvas.geodesic(edge)
        etree.SubElement(backdrop, "path", {"d": path})

    support = etree.SubElement(root, "g", {"id": "support", "stroke": "black", "fill": "none", "stroke-width": _fmt(width)})
    for edge in _sorted_edges(current - {s.doe_edge}):
        path, _ = canvas.geodesic(edge)
        etree.SubElement(support, "path", {"d": path})

    path, _ = canvas.geodesic((s.doe.initial, s.doe.terminal))
    etree.SubElement(
        root,
        "path",
        {
            "id": "doe",
            "d": path,
            "fill": "none",
            "stroke": "crimson",
            "stroke-width": _fmt(2 * width),
            "marker-end": "url(#arrow)",
        },
    )

    boxes = etree.SubElement(root, "g", {"id": "marks", "fill": "white", "stroke": "black", "stroke-width": _fmt(width)})
    half = 3 * width
    for edge in _sorted_edges(s.marks):
        _, (mx, my) = canvas.geodesic(edge)
        etree.SubElement(
            boxes,
            "rect",
            {
                "x": _fmt(mx - half),
                "y": _fmt(my - half),
                "width": _fmt(2 * half),
                "height": _fmt(2 * half),
            },
        )

    logger.debug(f"Rendered {len(current)} edges and {len(s.marks)} marks")
    return etree.tostring(root, encoding="unicode")

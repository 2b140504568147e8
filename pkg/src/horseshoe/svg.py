"""Hand-emitted SVG overlay for invariant-set point clouds.

No plotting dependency: the scene is a fixed 1000 x 1000 viewBox with
the domain box as the axis frame, exactly four strip outlines (the two
vertical strips at time n and the two horizontal strips arriving
there), and one circle per point.  The writer streams, so arbitrarily
deep point clouds never accumulate in memory.
"""

from __future__ import annotations

from typing import IO, Iterable

import numpy as np

from .curves import Orientation, Strip

__all__ = ["LambdaSvgWriter", "strip_outline", "write_lambda_svg"]

VIEW = 1000.0
_OUTLINE_SAMPLES = 256

_HEADER = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1000 1000">\n'
)

_STYLE = (
    "<style>\n"
    ".domain { fill: none; stroke: #000; stroke-width: 2; }\n"
    ".strip-v { fill: #3b6ea5; fill-opacity: 0.15; stroke: #3b6ea5; "
    "stroke-width: 1.5; }\n"
    ".strip-h { fill: #b0413e; fill-opacity: 0.15; stroke: #b0413e; "
    "stroke-width: 1.5; }\n"
    ".lambda-point { fill: #111; }\n"
    "</style>\n"
)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class _Projection:
    """World-to-view transform for a square domain box."""

    def __init__(self, box):
        self.box = box
        self.scale = VIEW / (box.xhi - box.xlo)

    def to_view(self, x: float, y: float) -> tuple[float, float]:
        u = (x - self.box.xlo) * self.scale
        v = (self.box.yhi - y) * self.scale
        return u, v


def strip_outline(strip: Strip, proj: _Projection, css_class: str) -> str:
    """Closed path following one boundary curve out and the other back."""
    t = np.linspace(strip.interval[0], strip.interval[1], _OUTLINE_SAMPLES)
    lo = strip.lower(t)
    hi = strip.upper(t)
    if strip.orientation is Orientation.VERTICAL:
        walk = [(lo[i], t[i]) for i in range(len(t))]
        walk += [(hi[i], t[i]) for i in range(len(t) - 1, -1, -1)]
    else:
        walk = [(t[i], lo[i]) for i in range(len(t))]
        walk += [(t[i], hi[i]) for i in range(len(t) - 1, -1, -1)]
    parts = []
    for idx, (x, y) in enumerate(walk):
        u, v = proj.to_view(x, y)
        parts.append(f"{'M' if idx == 0 else 'L'} {_fmt(u)} {_fmt(v)}")
    return f'<path class="{css_class}" d="{" ".join(parts)} Z"/>\n'


class LambdaSvgWriter:
    """Streaming writer: header and strips up front, one circle per
    point as they arrive, closing tag at the end."""

    def __init__(self, fh: IO[str], geom, n: int, radius: float = 1.5):
        self._fh = fh
        self._proj = _Projection(geom.box)
        self._radius = radius
        fh.write(_HEADER)
        fh.write(_STYLE)
        box = geom.box
        u0, v0 = self._proj.to_view(box.xlo, box.yhi)
        side = (box.xhi - box.xlo) * self._proj.scale
        fh.write(
            f'<rect class="domain" x="{_fmt(u0)}" y="{_fmt(v0)}" '
            f'width="{_fmt(side)}" height="{_fmt(side)}"/>\n'
        )
        for strip in geom.v_strips(n):
            fh.write(strip_outline(strip, self._proj, "strip-v"))
        for strip in geom.h_strips(n - 1):
            fh.write(strip_outline(strip, self._proj, "strip-h"))

    def add_point(self, x: float, y: float) -> None:
        u, v = self._proj.to_view(x, y)
        self._fh.write(
            f'<circle class="lambda-point" cx="{_fmt(u)}" cy="{_fmt(v)}" '
            f'r="{_fmt(self._radius)}"/>\n'
        )

    def close(self) -> None:
        self._fh.write("</svg>\n")


def write_lambda_svg(path: str, geom, n: int, points: Iterable[tuple[float, float]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = LambdaSvgWriter(fh, geom, n)
        for x, y in points:
            writer.add_point(x, y)
        writer.close()

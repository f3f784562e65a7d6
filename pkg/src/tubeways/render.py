"""SVG pictures of instances, solutions, order graphs and ear cuts.

Coordinates are converted to decimals only when written out; nothing here
feeds back into a decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .classify import OrderGraph
from .geom import Point
from .model import Instance, Solution

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")


@dataclass(frozen=True)
class RenderSpec:
    width: int = 800
    height: int = 500
    margin: int = 30
    fill_opacity: float = 0.18
    segment_stroke: str = "#000000"
    palette: tuple = PALETTE
    arrows: bool = True  # order-graph arrows between tube centres
    ears: bool = True  # shade cut ears
    labels: bool = True

    def color(self, k: int) -> str:
        return self.palette[k % len(self.palette)]


def num(v) -> str:
    """Nine significant digits, no exponent clutter for ordinary sizes."""
    s = format(float(v), ".9g")
    return "0" if s == "-0" else s


class _Frame:
    def __init__(self, pts: Sequence[Point], spec: RenderSpec):
        xs = [p.x for p in pts] or [Fraction(0)]
        ys = [p.y for p in pts] or [Fraction(0)]
        self.x0, self.y1 = min(xs), max(ys)
        w = max(xs) - self.x0 or Fraction(1)
        h = self.y1 - min(ys) or Fraction(1)
        m = spec.margin
        self.s = min(Fraction(spec.width - 2 * m) / w, Fraction(spec.height - 2 * m) / h)
        self.m = m

    def __call__(self, p: Point) -> str:
        return f"{num(self.m + (p.x - self.x0) * self.s)},{num(self.m + (self.y1 - p.y) * self.s)}"


def _poly(f: _Frame, pts: Sequence[Point], attrs: str) -> str:
    return f'<polygon points="{" ".join(f(p) for p in pts)}" {attrs}/>'


def _line(f: _Frame, pts: Sequence[Point], attrs: str) -> str:
    return f'<polyline points="{" ".join(f(p) for p in pts)}" fill="none" {attrs}/>'


def render_svg(
    inst: Instance,
    solution: Optional[Solution] = None,
    graph: Optional[OrderGraph] = None,
    truncated: Optional[Sequence] = None,
    ears: Sequence[Sequence[Point]] = (),
    spec: RenderSpec = RenderSpec(),
) -> str:
    """An SVG 1.1 document; identical inputs give identical bytes."""
    pts = [p for t in inst.tubes for p in t.region]
    if solution is not None:
        pts += [p for path in solution.paths for p in path.vertices]
    f = _Frame(pts, spec)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width}" height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
        f'<rect x="0" y="0" width="{spec.width}" height="{spec.height}" fill="#ffffff"/>',
        '<g id="tubes">',
    ]
    for k, t in enumerate(inst.tubes):
        c = spec.color(k)
        out.append(_poly(f, t.region, f'fill="{c}" fill-opacity="{spec.fill_opacity}" stroke="{c}" stroke-width="0.5"'))
    out.append("</g>")
    if truncated is not None:
        out.append('<g id="truncated">')
        for k, t in enumerate(truncated):
            out.append(_poly(f, t.region, f'fill="none" stroke="{spec.color(k)}" stroke-width="1.5" stroke-dasharray="4 2"'))
        out.append("</g>")
    if ears and spec.ears:
        out.append('<g id="ears">')
        for e in ears:
            out.append(_poly(f, e, 'fill="#808080" fill-opacity="0.6" stroke="#606060" stroke-width="0.5"'))
        out.append("</g>")
    out.append('<g id="segments">')
    for t in inst.tubes:
        for s in (t.left, t.right):
            out.append(_line(f, [Point(s.x, s.y_lo), Point(s.x, s.y_hi)], f'stroke="{spec.segment_stroke}" stroke-width="2"'))
    out.append("</g>")
    if solution is not None:
        out.append('<g id="paths">')
        for k, path in enumerate(solution.paths):
            out.append(_line(f, path.vertices, f'stroke="{spec.color(k)}" stroke-width="2"'))
        out.append("</g>")
    if graph is not None and spec.arrows:
        out.append('<defs><marker id="head" markerWidth="8" markerHeight="8" refX="7" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#333333"/></marker></defs>')
        out.append('<g id="order">')
        cs = [_centre(t.region) for t in inst.tubes]
        for i, j in sorted(graph.edges):
            out.append(_line(f, [cs[i], cs[j]], 'stroke="#333333" stroke-width="1" marker-end="url(#head)"'))
        out.append("</g>")
    if spec.labels:
        out.append('<g id="labels" font-family="sans-serif" font-size="12">')
        for k, t in enumerate(inst.tubes):
            x, y = f(Point(t.left.x, t.left.y_hi)).split(",")
            out.append(f'<text x="{x}" y="{y}" dy="-4" fill="{spec.color(k)}">{escape(str(k))}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _centre(pts: Sequence[Point]) -> Point:
    n = len(pts)
    return Point(sum(p.x for p in pts) / n, sum(p.y for p in pts) / n)

"""Deterministic SVG pictures of a barrier, the unit square and overlays.

Output depends only on the inputs: coordinates are printed with a fixed
number of decimals and elements appear in input order.
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

from .geometry import XY, Barrier, Line, Point, Segment, clip_params, rectangle

_STYLE = (
    ".square{fill:none;stroke:#888;stroke-width:1}"
    ".segment{stroke:#000;stroke-width:2;stroke-linecap:round}"
    ".cut{stroke:#4a7;stroke-width:1}"
    ".witness{stroke:#d22;stroke-width:1.5;stroke-dasharray:6 4}"
)


def _fmt(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _view(barrier: Barrier, margin: float) -> Tuple[float, float, float, float]:
    xs = [0.0, 1.0] + [c for s in barrier for c in (s.a.xy[0], s.b.xy[0])]
    ys = [0.0, 1.0] + [c for s in barrier for c in (s.a.xy[1], s.b.xy[1])]
    return min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin


def _line_in_box(line: Line, box) -> Optional[Tuple[XY, XY]]:
    x0, y0, x1, y1 = box
    ox, oy = line.anchor()
    dx, dy = line.direction
    big = 4 * (abs(x0) + abs(y0) + abs(x1) + abs(y1) + 1)
    probe = Segment(Point(ox - big * dx, oy - big * dy), Point(ox + big * dx, oy + big * dy))
    rng = clip_params(probe, rectangle(x0, y0, x1, y1), tol=0.0)
    if rng is None or rng[1] <= rng[0]:
        return None
    return probe.at(rng[0]), probe.at(rng[1])


def render_svg(barrier: Barrier, witness: Optional[Line] = None,
               cuts: Sequence[Tuple[XY, XY]] = (), size: int = 400, margin: float = 0.1) -> str:
    """SVG document: square outline, optional partition cuts, barrier segments
    and an optional dashed witness line (in that order)."""
    box = _view(barrier, margin)
    x0, y0, x1, y1 = box
    scale = size / max(x1 - x0, y1 - y0)
    w, h = (x1 - x0) * scale, (y1 - y0) * scale

    def X(x):
        return _fmt((x - x0) * scale)

    def Y(y):  # y axis points up in the picture
        return _fmt((y1 - y) * scale)

    def line_el(cls, p, q):
        return f'  <line class="{cls}" x1="{X(p[0])}" y1="{Y(p[1])}" x2="{X(q[0])}" y2="{Y(q[1])}"/>'

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f"  <style>{_STYLE}</style>",
        f'  <rect class="square" x="{X(0)}" y="{Y(1)}" width="{_fmt(scale)}" height="{_fmt(scale)}"/>',
    ]
    out += [line_el("cut", p, q) for p, q in cuts]
    out += [line_el("segment", s.a.xy, s.b.xy) for s in barrier]
    if witness is not None:
        ends = _line_in_box(witness, box)
        if ends is not None:
            out.append(line_el("witness", *ends))
    out.append("</svg>")
    return "\n".join(out) + "\n"

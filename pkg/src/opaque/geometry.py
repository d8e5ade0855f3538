"""Planar kernel: points, segments, lines in normal form and convex polygons.

Coordinates may be given as floats or as :class:`fractions.Fraction`; exact
values are kept on the objects (so barrier files round-trip) but every
geometric computation is carried out in double precision with the absolute
tolerance :data:`EPS`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

Real = Union[int, float, Fraction]
XY = Tuple[float, float]

EPS = 1e-9


class GeometryError(ValueError):
    """Invalid geometric input (degenerate segment, non-convex polygon, ...)."""


@dataclass(frozen=True)
class Point:
    x: Real
    y: Real

    def __post_init__(self):
        if not (math.isfinite(float(self.x)) and math.isfinite(float(self.y))):
            raise GeometryError(f"non-finite coordinate in {self!r}")

    @property
    def xy(self) -> XY:
        return (float(self.x), float(self.y))

    def __iter__(self):
        yield self.x
        yield self.y


def as_point(p) -> Point:
    if isinstance(p, Point):
        return p
    x, y = p
    return Point(x, y)


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", as_point(self.b))
        if self.length < EPS:
            raise GeometryError(f"degenerate segment {self.a.xy} -> {self.b.xy}")

    @classmethod
    def from_coords(cls, x1: Real, y1: Real, x2: Real, y2: Real) -> "Segment":
        return cls(Point(x1, y1), Point(x2, y2))

    @property
    def length(self) -> float:
        (ax, ay), (bx, by) = self.a.xy, self.b.xy
        return math.hypot(bx - ax, by - ay)

    @property
    def angle(self) -> float:
        """Direction angle in [0, pi)."""
        (ax, ay), (bx, by) = self.a.xy, self.b.xy
        return math.atan2(by - ay, bx - ax) % math.pi

    @property
    def midpoint(self) -> XY:
        (ax, ay), (bx, by) = self.a.xy, self.b.xy
        return ((ax + bx) / 2, (ay + by) / 2)

    def at(self, t: float) -> XY:
        (ax, ay), (bx, by) = self.a.xy, self.b.xy
        return (ax + t * (bx - ax), ay + t * (by - ay))

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)


@dataclass(frozen=True)
class Barrier:
    """A candidate opaque set: a finite, ordered list of closed segments."""

    segments: Tuple[Segment, ...]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        if not segs:
            raise GeometryError("a barrier needs at least one segment")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def from_coords(cls, coords: Iterable, name: Optional[str] = None) -> "Barrier":
        return cls(tuple(Segment(as_point(p), as_point(q)) for p, q in coords), name=name)

    @property
    def length(self) -> float:
        return math.fsum(s.length for s in self.segments)

    def without(self, index: int) -> "Barrier":
        segs = self.segments[:index] + self.segments[index + 1:]
        return Barrier(segs, name=self.name)

    def with_segment(self, seg: Segment) -> "Barrier":
        return Barrier(self.segments + (seg,), name=self.name)

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)


@dataclass(frozen=True)
class Line:
    """Unoriented line of direction ``theta``; its points satisfy n . x = p
    with unit normal n = (-sin theta, cos theta)."""

    theta: float
    p: float

    def __post_init__(self):
        theta = float(self.theta)
        p = float(self.p)
        # theta in [0, pi); flipping the direction flips the normal
        k = math.floor(theta / math.pi)
        theta -= k * math.pi
        if k % 2:
            p = -p
        if theta >= math.pi:
            theta = 0.0
            p = -p
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "p", p)

    @classmethod
    def through(cls, p: XY, q: XY) -> "Line":
        theta = math.atan2(q[1] - p[1], q[0] - p[0])
        n = (-math.sin(theta), math.cos(theta))
        return cls(theta, n[0] * p[0] + n[1] * p[1])

    @property
    def normal(self) -> XY:
        return (-math.sin(self.theta), math.cos(self.theta))

    @property
    def direction(self) -> XY:
        return (math.cos(self.theta), math.sin(self.theta))

    def offset_of(self, pt: XY) -> float:
        nx, ny = self.normal
        return nx * pt[0] + ny * pt[1]

    def signed_distance(self, pt: XY) -> float:
        return self.offset_of(pt) - self.p

    def anchor(self) -> XY:
        """Foot of the perpendicular from the origin."""
        nx, ny = self.normal
        return (nx * self.p, ny * self.p)

    def x_at(self, y: float) -> float:
        """x-coordinate where the line crosses the horizontal y (non-horizontal lines)."""
        nx, ny = self.normal
        return (self.p - ny * y) / nx


def _cross(o: XY, a: XY, b: XY) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


class ConvexPolygon:
    """Convex polygon stored as a CCW list of float vertices.

    Duplicate and collinear vertices are merged; clockwise input is
    reoriented; a reflex vertex raises :class:`GeometryError`.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable):
        pts = [as_point(v).xy for v in vertices]
        area2 = sum(_cross((0.0, 0.0), pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))) if pts else 0.0
        if area2 < 0:
            pts.reverse()
        merged = _merge_collinear(pts)
        if len(merged) < 3:
            raise GeometryError("convex polygon needs at least 3 non-collinear vertices")
        m = len(merged)
        for i in range(m):
            if _cross(merged[i - 1], merged[i], merged[(i + 1) % m]) < -EPS:
                raise GeometryError("polygon is not convex")
        self.vertices: Tuple[XY, ...] = tuple(merged)

    def __repr__(self):
        return f"ConvexPolygon({list(self.vertices)!r})"

    def __eq__(self, other):
        return isinstance(other, ConvexPolygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def edges(self) -> Iterator[Tuple[XY, XY]]:
        v = self.vertices
        for i in range(len(v)):
            yield v[i], v[(i + 1) % len(v)]

    @property
    def perimeter(self) -> float:
        return math.fsum(math.dist(a, b) for a, b in self.edges())

    @property
    def area(self) -> float:
        return math.fsum(a[0] * b[1] - a[1] * b[0] for a, b in self.edges()) / 2

    def contains(self, pt: XY, tol: float = EPS) -> bool:
        for a, b in self.edges():
            if _cross(a, b, pt) < -tol * math.dist(a, b):
                return False
        return True

    def offset_interval(self, theta: float) -> Tuple[float, float]:
        nx, ny = -math.sin(theta), math.cos(theta)
        vals = [nx * x + ny * y for x, y in self.vertices]
        return min(vals), max(vals)

    def translated(self, dx: float, dy: float) -> "ConvexPolygon":
        return ConvexPolygon([(x + dx, y + dy) for x, y in self.vertices])


def _merge_collinear(pts: Sequence[XY]) -> list:
    out = []
    for p in pts:
        if not out or math.dist(out[-1], p) > EPS:
            out.append(p)
    if len(out) > 1 and math.dist(out[0], out[-1]) <= EPS:
        out.pop()
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            if abs(_cross(a, b, c)) <= EPS * max(math.dist(a, c), 1.0):
                del out[i]
                changed = True
                break
    return out


def rectangle(x0: float, y0: float, x1: float, y1: float) -> ConvexPolygon:
    return ConvexPolygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def unit_square() -> ConvexPolygon:
    return rectangle(0.0, 0.0, 1.0, 1.0)


def width(poly: ConvexPolygon, alpha: float) -> float:
    """Length of the offset interval of direction-``alpha`` lines meeting ``poly``."""
    lo, hi = poly.offset_interval(alpha)
    return hi - lo


def project_normal(s: Segment, alpha: float) -> Tuple[float, float]:
    """Closed interval of offsets p for which Line(alpha, p) meets ``s``."""
    nx, ny = -math.sin(alpha), math.cos(alpha)
    (ax, ay), (bx, by) = s.a.xy, s.b.xy
    pa, pb = nx * ax + ny * ay, nx * bx + ny * by
    return (pa, pb) if pa <= pb else (pb, pa)


def clip_params(s: Segment, poly: ConvexPolygon, tol: float = EPS) -> Optional[Tuple[float, float]]:
    """Parameter range [t0, t1] of ``s`` inside the closed polygon (Cyrus-Beck).

    Crossing points are exact; ``tol`` only decides whether a segment running
    parallel to an edge counts as lying on it.
    """
    (ax, ay), (bx, by) = s.a.xy, s.b.xy
    dx, dy = bx - ax, by - ay
    slen = math.hypot(dx, dy)
    t0, t1 = 0.0, 1.0
    for (px, py), (qx, qy) in poly.edges():
        ex, ey = qx - px, qy - py
        elen = math.hypot(ex, ey)
        # inward normal of a CCW edge is (-ey, ex); inside <=> f(t) >= 0
        f0 = (-ey * (ax - px) + ex * (ay - py)) / elen
        df = (-ey * dx + ex * dy) / elen
        if abs(df) <= 1e-12 * slen:
            if f0 < -tol:
                return None
            continue
        t = -f0 / df
        if df > 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 > t1:
            return None
    return t0, t1


def clip(s: Segment, poly: ConvexPolygon) -> list:
    """``s`` intersected with ``poly``: a list of 0 or 1 segments."""
    rng = clip_params(s, poly)
    if rng is None or (rng[1] - rng[0]) * s.length < EPS:
        return []
    t0, t1 = rng
    if t0 <= 0.0 and t1 >= 1.0:
        return [s]
    return [Segment(Point(*s.at(max(t0, 0.0))), Point(*s.at(min(t1, 1.0))))]


def clipped_length(s: Segment, poly: ConvexPolygon) -> float:
    rng = clip_params(s, poly)
    if rng is None:
        return 0.0
    return max(0.0, rng[1] - rng[0]) * s.length


def partition_lengths(s: Segment, regions: Mapping[str, ConvexPolygon]) -> Tuple[dict, float]:
    """Split ``s`` across labelled regions; returns (lengths by label, outside length).

    A piece lying on a boundary shared by several regions is credited to the
    lexicographically smallest label, so the lengths over a partition add up
    to the covered length exactly once.
    """
    cuts = {0.0, 1.0}
    for poly in regions.values():
        rng = clip_params(s, poly)
        if rng is not None:
            cuts.update(min(max(t, 0.0), 1.0) for t in rng)
    ts = sorted(cuts)
    labels = sorted(regions)
    out = {lab: 0.0 for lab in labels}
    outside = 0.0
    L = s.length
    for u, v in zip(ts, ts[1:]):
        piece = (v - u) * L
        if piece <= 0.0:
            continue
        mid = s.at((u + v) / 2)
        for lab in labels:
            if regions[lab].contains(mid):
                out[lab] += piece
                break
        else:
            outside += piece
    return out, outside


def clip_polygon_halfplane(vertices: Sequence[XY], n: XY, c: float) -> list:
    """Sutherland-Hodgman step keeping the part with n . x >= c."""
    out = []
    m = len(vertices)
    for i in range(m):
        p, q = vertices[i], vertices[(i + 1) % m]
        fp = n[0] * p[0] + n[1] * p[1] - c
        fq = n[0] * q[0] + n[1] * q[1] - c
        if fp >= 0:
            out.append(p)
        if (fp >= 0) != (fq >= 0):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def intersect_halfplanes(poly: ConvexPolygon, halfplanes: Iterable[Tuple[XY, float]]) -> Optional[ConvexPolygon]:
    verts = list(poly.vertices)
    for n, c in halfplanes:
        verts = clip_polygon_halfplane(verts, n, c)
        if len(verts) < 3:
            return None
    try:
        return ConvexPolygon(verts)
    except GeometryError:
        return None


def point_segment_distance(pt: XY, s: Segment) -> float:
    (ax, ay), (bx, by) = s.a.xy, s.b.xy
    dx, dy = bx - ax, by - ay
    t = ((pt[0] - ax) * dx + (pt[1] - ay) * dy) / (dx * dx + dy * dy)
    t = min(1.0, max(0.0, t))
    return math.hypot(pt[0] - ax - t * dx, pt[1] - ay - t * dy)


def segments_intersect(s: Segment, t: Segment, tol: float = EPS) -> bool:
    return segment_distance(s, t) <= tol


def segment_distance(s: Segment, t: Segment) -> float:
    a, b, c, d = s.a.xy, s.b.xy, t.a.xy, t.b.xy
    d1, d2 = _cross(c, d, a), _cross(c, d, b)
    d3, d4 = _cross(a, b, c), _cross(a, b, d)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return 0.0
    return min(point_segment_distance(a, t), point_segment_distance(b, t),
               point_segment_distance(c, s), point_segment_distance(d, s))


def line_chord(line: Line, poly: ConvexPolygon) -> float:
    """Length of ``line`` inside ``poly`` (0 if they miss)."""
    ox, oy = line.anchor()
    dx, dy = line.direction
    big = 4.0 * (1.0 + max(math.hypot(x - ox, y - oy) for x, y in poly.vertices))
    probe = Segment(Point(ox - big * dx, oy - big * dy), Point(ox + big * dx, oy + big * dy))
    rng = clip_params(probe, poly, tol=0.0)
    if rng is None:
        return 0.0
    return max(0.0, rng[1] - rng[0]) * probe.length


def line_segment_distance(line: Line, s: Segment) -> float:
    da = line.signed_distance(s.a.xy)
    db = line.signed_distance(s.b.xy)
    if (da <= 0 <= db) or (db <= 0 <= da):
        return 0.0
    return min(abs(da), abs(db))


def convex_hull(points: Iterable[XY]) -> list:
    """Andrew's monotone chain; CCW, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class AngleClass:
    tag: str  # "X" near-horizontal, "Y" near-vertical, "Z" other
    alpha_s: float
    beta_s: float


def classify(s: Segment, phi: float) -> AngleClass:
    """Near-horizontal / near-vertical / other classification at threshold ``phi``."""
    if not 0 < phi < math.pi / 4:
        raise ValueError("phi must lie in (0, pi/4)")
    d = s.angle
    to_x = min(d, math.pi - d)
    to_y = abs(d - math.pi / 2)
    alpha = min(to_x, to_y)
    tag = "Z"
    if alpha <= phi + 1e-12:
        tag = "X" if to_x <= to_y else "Y"
    return AngleClass(tag, alpha, math.pi / 4 - alpha)

"""Measures of sets of lines (Sylvester / Cauchy-Crofton).

The invariant measure of the lines meeting a convex body is its perimeter
(``2|s|`` for a segment); the lines meeting two disjoint convex bodies have
measure ``L_int - L_ext``, the difference between the crossed and the
uncrossed closed string around the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .geometry import EPS, XY, ConvexPolygon, GeometryError, Segment, convex_hull

Body = Union[ConvexPolygon, Segment]


class OverlapError(GeometryError):
    """The two bodies are not disjoint."""


@dataclass(frozen=True)
class CoverLengths:
    l_ext: float
    l_int: float


@dataclass(frozen=True)
class MeetingMeasure:
    covers: CoverLengths
    measure: float


@dataclass(frozen=True)
class ConeBound:
    theta_max: float
    bound: float
    apex: XY


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    standard_error: float
    samples: int


def _verts(body: Body) -> list:
    if isinstance(body, Segment):
        return [body.a.xy, body.b.xy]
    return list(body.vertices)


def _boundary_length(body: Body) -> float:
    if isinstance(body, Segment):
        return 2 * body.length
    return body.perimeter


def line_measure_single(body: Body) -> float:
    """Measure of all lines meeting ``body``."""
    return _boundary_length(body)


def _side(p: XY, q: XY, r: XY) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _axes(v: Sequence[XY]):
    m = len(v)
    for i in range(m if m > 2 else 1):
        p, q = v[i], v[(i + 1) % m]
        dx, dy = q[0] - p[0], q[1] - p[1]
        n = math.hypot(dx, dy)
        yield (-dy / n, dx / n)
        if m == 2:
            yield (dx / n, dy / n)


def separation(b1: Body, b2: Body) -> float:
    """Largest gap between the bodies' projections over all edge normals
    (positive iff disjoint; separating-axis test)."""
    v1, v2 = _verts(b1), _verts(b2)
    best = -math.inf
    for n in list(_axes(v1)) + list(_axes(v2)):
        p1 = [n[0] * x + n[1] * y for x, y in v1]
        p2 = [n[0] * x + n[1] * y for x, y in v2]
        best = max(best, min(p2) - max(p1), min(p1) - max(p2))
    return best


def _require_disjoint(b1: Body, b2: Body) -> None:
    if separation(b1, b2) <= EPS:
        raise OverlapError("bodies intersect (or touch)")


def _internal_tangents(v1: Sequence[XY], v2: Sequence[XY]):
    """Vertex index pairs (i, j) of the two separating common tangents.

    The first pair has body 1 on the left of the directed line v1[i] -> v2[j];
    the second has it on the right.  Among collinear candidates the closest
    pair is kept, so collinear boundary runs count as arc, not tangent.
    """
    found = {1: None, -1: None}
    scale = max(1.0, max(abs(c) for p in list(v1) + list(v2) for c in p))
    tol = 1e-12 * scale * scale
    for i, p in enumerate(v1):
        for j, q in enumerate(v2):
            if math.dist(p, q) <= EPS:
                continue
            s1 = [_side(p, q, r) for r in v1]
            s2 = [_side(p, q, r) for r in v2]
            for sign in (1, -1):
                if all(sign * s >= -tol for s in s1) and all(sign * s <= tol for s in s2):
                    d = math.dist(p, q)
                    if found[sign] is None or d < found[sign][2] - 1e-15:
                        found[sign] = (i, j, d)
    if found[1] is None or found[-1] is None:
        raise OverlapError("no separating tangents: bodies are not disjoint")
    return found[1][:2], found[-1][:2]


def _line_intersection(p1: XY, q1: XY, p2: XY, q2: XY) -> XY:
    d1 = (q1[0] - p1[0], q1[1] - p1[1])
    d2 = (q2[0] - p2[0], q2[1] - p2[1])
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if den == 0:
        # both tangents on one line (collinear bodies): any point between will do
        return ((p1[0] + q1[0]) / 2, (p1[1] + q1[1]) / 2)
    t = ((p2[0] - p1[0]) * d2[1] - (p2[1] - p1[1]) * d2[0]) / den
    return (p1[0] + t * d1[0], p1[1] + t * d1[1])


def _far_arc(v: Sequence[XY], i: int, k: int, cross: XY, closed_len: float) -> float:
    """Boundary length between vertices i and k on the side away from ``cross``."""
    if i == k:
        return closed_len
    m = len(v)
    if m == 2:
        return math.dist(v[0], v[1])

    def chain(a, b):
        idx = [a]
        while idx[-1] != b:
            idx.append((idx[-1] + 1) % m)
        return idx

    p, q = v[i], v[k]
    side_x = _side(p, q, cross)
    best = None
    for c in (chain(i, k), chain(k, i)):
        length = math.fsum(math.dist(v[c[t]], v[c[t + 1]]) for t in range(len(c) - 1))
        inner = [v[t] for t in c[1:-1]]
        # the far chain's interior vertices sit opposite the crossing point
        score = sum(_side(p, q, r) for r in inner) * (-1 if side_x > 0 else 1)
        if best is None or score > best[0]:
            best = (score, length)
    return best[1]


def cover_lengths(b1: Body, b2: Body) -> CoverLengths:
    _require_disjoint(b1, b2)
    v1, v2 = _verts(b1), _verts(b2)
    hull = convex_hull(v1 + v2)
    l_ext = math.fsum(math.dist(hull[i], hull[(i + 1) % len(hull)]) for i in range(len(hull)))
    (i1, j1), (i2, j2) = _internal_tangents(v1, v2)
    cross = _line_intersection(v1[i1], v2[j1], v1[i2], v2[j2])
    arc1 = _far_arc(v1, i1, i2, cross, _boundary_length(b1))
    arc2 = _far_arc(v2, j1, j2, cross, _boundary_length(b2))
    l_int = math.dist(v1[i1], v2[j1]) + math.dist(v1[i2], v2[j2]) + arc1 + arc2
    return CoverLengths(l_ext, l_int)


def meeting_measure(b1: Body, b2: Body) -> MeetingMeasure:
    covers = cover_lengths(b1, b2)
    return MeetingMeasure(covers, covers.l_int - covers.l_ext)


def subtended_angle(c: XY, body: Body) -> float:
    """Opening angle of the smallest cone with apex ``c`` containing ``body``."""
    v = _verts(body)
    cx = sum(p[0] for p in v) / len(v) - c[0]
    cy = sum(p[1] for p in v) / len(v) - c[1]
    ref = math.atan2(cy, cx)
    rel = [math.remainder(math.atan2(p[1] - c[1], p[0] - c[0]) - ref, 2 * math.pi) for p in v]
    return max(rel) - min(rel)


def cone_angle_bound(s: Segment, body: Body, samples: int = 64, tol: float = 1e-10) -> ConeBound:
    """Largest cone angle over apexes on ``s`` and the bound ``2 sin(theta/2)|s|``.

    The angle is sampled along ``s`` (endpoints included) and refined by
    golden-section search around the best sample.
    """
    _require_disjoint(s, body)

    def f(t):
        return subtended_angle(s.at(t), body)

    ts = [k / samples for k in range(samples + 1)]
    vals = [f(t) for t in ts]
    k = max(range(len(ts)), key=vals.__getitem__)
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, samples)]
    g = (math.sqrt(5) - 1) / 2
    while (hi - lo) * max(s.length, 1.0) > tol:
        m1, m2 = hi - g * (hi - lo), lo + g * (hi - lo)
        if f(m1) < f(m2):
            lo = m1
        else:
            hi = m2
    t_best, best = ts[k], vals[k]
    t_mid = (lo + hi) / 2
    if f(t_mid) > best:
        t_best, best = t_mid, f(t_mid)
    return ConeBound(best, 2 * math.sin(best / 2) * s.length, s.at(t_best))


def _projections(v: np.ndarray, nx: np.ndarray, ny: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    proj = nx[:, None] * v[None, :, 0] + ny[:, None] * v[None, :, 1]
    return proj.min(axis=1), proj.max(axis=1)


def mc_meeting_measure(b1: Body, b2: Optional[Body] = None, samples: int = 10**6,
                       seed: int = 0, chunk: int = 1 << 18) -> MonteCarloEstimate:
    """Monte-Carlo estimate of the measure of lines meeting ``b1`` (and ``b2``).

    Lines are drawn uniformly in (theta, p) over a disc-shaped band around a
    square window twice the size of the bodies' bounding square.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    bodies = [np.array(_verts(b1), dtype=float)]
    if b2 is not None:
        bodies.append(np.array(_verts(b2), dtype=float))
    allv = np.vstack(bodies)
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    centre = (lo + hi) / 2
    side = 2 * max(float((hi - lo).max()), EPS)
    radius = side * math.sqrt(2) / 2
    window = 2 * radius * math.pi
    rel = [b - centre for b in bodies]
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        theta = rng.uniform(0.0, math.pi, n)
        p = rng.uniform(-radius, radius, n)
        nx, ny = -np.sin(theta), np.cos(theta)
        ok = np.ones(n, dtype=bool)
        for v in rel:
            a, b = _projections(v, nx, ny)
            ok &= (a <= p) & (p <= b)
        hits += int(ok.sum())
        done += n
    frac = hits / samples
    se = window * math.sqrt(frac * (1 - frac) / samples)
    return MonteCarloEstimate(window * frac, se, samples)


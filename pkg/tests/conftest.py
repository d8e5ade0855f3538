import math
from fractions import Fraction

import numpy as np
import pytest

from opaque.geometry import Barrier, ConvexPolygon, Line, Point, Segment, convex_hull
from opaque.line_measure import separation


def random_barrier(rng, max_segments=20, lo=0.0, hi=1.0):
    n = int(rng.integers(1, max_segments + 1))
    segs = []
    while len(segs) < n:
        a, b = rng.uniform(lo, hi, 2), rng.uniform(lo, hi, 2)
        if np.hypot(*(a - b)) > 1e-6:
            segs.append(((float(a[0]), float(a[1])), (float(b[0]), float(b[1]))))
    return Barrier.from_coords(segs)


def exact_witness_check(line: Line, barrier: Barrier, clearance: float) -> bool:
    """Rational re-check of a witness: every endpoint is on the same side and
    at least ``clearance`` away, and the unit square has corners strictly on
    both sides."""
    nx, ny = Fraction(-math.sin(line.theta)), Fraction(math.cos(line.theta))
    p = Fraction(line.p)
    nn = nx * nx + ny * ny
    c2 = Fraction(clearance) ** 2 * (1 - Fraction(1, 10 ** 6))

    def f(x, y):
        return nx * Fraction(x) + ny * Fraction(y) - p

    for s in barrier:
        da, db = f(*s.a.xy), f(*s.b.xy)
        if da * db <= 0:
            return False
        if min(da * da, db * db) < c2 * nn:
            return False
    corners = [f(x, y) for x, y in ((0, 0), (1, 0), (1, 1), (0, 1))]
    return min(corners) < 0 < max(corners)


def crofton_meeting_measure(v1, v2, n=200_000):
    """Measure of lines meeting two convex bodies, by midpoint quadrature of
    the overlap of their offset intervals over directions."""
    v1, v2 = np.asarray(v1, float), np.asarray(v2, float)
    theta = (np.arange(n) + 0.5) * (math.pi / n)
    nx, ny = -np.sin(theta), np.cos(theta)
    p1 = nx[:, None] * v1[None, :, 0] + ny[:, None] * v1[None, :, 1]
    p2 = nx[:, None] * v2[None, :, 0] + ny[:, None] * v2[None, :, 1]
    overlap = np.minimum(p1.max(1), p2.max(1)) - np.maximum(p1.min(1), p2.min(1))
    return float(np.clip(overlap, 0, None).sum() * math.pi / n)


def random_polygon(rng, centre, radius):
    pts = centre + rng.uniform(-radius, radius, (int(rng.integers(3, 9)), 2))
    hull = convex_hull([tuple(map(float, p)) for p in pts])
    if len(hull) < 3:
        return None
    return ConvexPolygon(hull)


def random_segment(rng, centre, radius):
    a = centre + rng.uniform(-radius, radius, 2)
    b = centre + rng.uniform(-radius, radius, 2)
    if np.hypot(*(a - b)) < 1e-3:
        return None
    return Segment(Point(*map(float, a)), Point(*map(float, b)))


def random_disjoint_pair(rng, first="any"):
    while True:
        c1 = rng.uniform(-1, 1, 2)
        c2 = c1 + rng.uniform(-3, 3, 2)
        r1, r2 = rng.uniform(0.05, 1, 2)
        b1 = random_segment(rng, c1, r1) if first == "segment" or rng.random() < 0.5 else random_polygon(rng, c1, r1)
        b2 = random_segment(rng, c2, r2) if rng.random() < 0.3 else random_polygon(rng, c2, r2)
        if b1 is None or b2 is None:
            continue
        if separation(b1, b2) > 1e-2:
            return b1, b2


def verts(b):
    return [b.a.xy, b.b.xy] if isinstance(b, Segment) else list(b.vertices)


@pytest.fixture(scope="session")
def paper_lp_solution():
    from opaque.lp_bound import build_interior_lp, solve_exact
    lp = build_interior_lp(precision_bits=64)
    return lp, solve_exact(lp)

"""Opaqueness checks by projection coverage and witness-line search.

For a fixed direction theta every segment blocks a closed interval of line
offsets; a direction is opaque when the union of these intervals covers the
body's own offset interval.  :func:`search_witness` scans a grid of
directions together with every *critical* direction (where two projected
endpoints coincide, so the combinatorial order of interval endpoints changes)
and the midpoints between consecutive critical directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .geometry import (
    EPS,
    Barrier,
    ConvexPolygon,
    Line,
    line_chord,
    project_normal,
    unit_square,
)

DEFAULT_CLEARANCE = 1e-6
DEFAULT_STEP = 1e-4


@dataclass(frozen=True)
class CoverageReport:
    theta: float
    body_interval: Tuple[float, float]
    gaps: Tuple[Tuple[float, float], ...]
    covered_length: float

    @property
    def width(self) -> float:
        return self.body_interval[1] - self.body_interval[0]

    @property
    def gap_length(self) -> float:
        return math.fsum(b - a for a, b in self.gaps)


@dataclass(frozen=True)
class WitnessLine:
    line: Line
    clearance: float
    penetration: float

    def to_dict(self) -> dict:
        return {
            "theta": self.line.theta,
            "p": self.line.p,
            "clearance": self.clearance,
            "penetration": self.penetration,
        }


@dataclass(frozen=True)
class WitnessSearch:
    """Outcome of a scan: ``witness`` (certified invalid), ``opaque`` (no gap at
    any scanned direction) or ``inconclusive`` (gaps narrower than the
    clearance, or too close to the body's edge)."""

    status: str
    witness: Optional[WitnessLine]
    angles_scanned: int
    widest_gap: float


def _merged_gaps(intervals: Sequence[Tuple[float, float]], lo: float, hi: float):
    """Gaps of [lo, hi] not covered by ``intervals``; each gap carries flags
    telling whether its ends are barrier projections (True) or body edges."""
    gaps = []
    cursor, cursor_is_seg = lo, False
    for a, b in sorted(intervals):
        if b < lo or a > hi:
            continue
        if a - cursor > EPS:
            gaps.append((cursor, min(a, hi), cursor_is_seg, a <= hi))
        if b > cursor:
            cursor, cursor_is_seg = b, True
        if cursor >= hi:
            break
    if hi - cursor > EPS:
        gaps.append((cursor, hi, cursor_is_seg, False))
    return gaps


def coverage_gaps(barrier: Barrier, theta: float, body: Optional[ConvexPolygon] = None) -> CoverageReport:
    """Uncovered offsets of ``body`` for direction-``theta`` lines."""
    body = body or unit_square()
    lo, hi = body.offset_interval(theta)
    gaps = _merged_gaps([project_normal(s, theta) for s in barrier], lo, hi)
    opened = tuple((a, b) for a, b, _, _ in gaps)
    covered = (hi - lo) - math.fsum(b - a for a, b in opened)
    return CoverageReport(theta, (lo, hi), opened, covered)


def critical_angles(barrier: Barrier, body: ConvexPolygon) -> np.ndarray:
    pts = [p for s in barrier for p in (s.a.xy, s.b.xy)] + list(body.vertices)
    P = np.array(sorted(set(pts)))
    dx = P[None, :, 0] - P[:, None, 0]
    dy = P[None, :, 1] - P[:, None, 1]
    iu = np.triu_indices(len(P), k=1)
    ang = np.mod(np.arctan2(dy[iu], dx[iu]), math.pi)
    return np.unique(ang)


def scan_angles(barrier: Barrier, body: ConvexPolygon, angular_step: float) -> np.ndarray:
    crit = critical_angles(barrier, body)
    ext = np.concatenate([crit, crit[:1] + math.pi])
    mids = (ext[:-1] + ext[1:]) / 2
    n = max(1, int(math.ceil(math.pi / angular_step)))
    grid = np.arange(n) * (math.pi / n)
    thetas = np.mod(np.concatenate([grid, crit, mids]), math.pi)
    return np.unique(thetas)


def _gap_table(barrier: Barrier, body: ConvexPolygon, thetas: np.ndarray) -> np.ndarray:
    """Widest uncovered gap per direction (vectorised sweep over sorted intervals)."""
    nx, ny = -np.sin(thetas)[:, None], np.cos(thetas)[:, None]
    A = np.array([s.a.xy for s in barrier])
    B = np.array([s.b.xy for s in barrier])
    pa = nx * A[:, 0] + ny * A[:, 1]
    pb = nx * B[:, 0] + ny * B[:, 1]
    lo_s, hi_s = np.minimum(pa, pb), np.maximum(pa, pb)
    V = np.array(body.vertices)
    pv = nx * V[:, 0] + ny * V[:, 1]
    blo, bhi = pv.min(axis=1), pv.max(axis=1)
    order = np.argsort(lo_s, axis=1)
    lo_sorted = np.take_along_axis(lo_s, order, axis=1)
    hi_sorted = np.take_along_axis(hi_s, order, axis=1)
    reach = np.maximum.accumulate(np.maximum(hi_sorted, blo[:, None]), axis=1)
    prev = np.concatenate([blo[:, None], reach[:, :-1]], axis=1)
    inner = np.minimum(lo_sorted, bhi[:, None]) - prev
    tail = bhi - reach[:, -1]
    return np.maximum(inner.max(axis=1), tail)


def _best_offset(line_theta: float, gap, body: ConvexPolygon, clearance: float):
    """Offset inside ``gap`` with clearance from the barrier and the longest chord."""
    a, b, a_seg, b_seg = gap
    lo = a + (clearance if a_seg else 0.0)
    hi = b - (clearance if b_seg else 0.0)
    if hi < lo:
        return None

    def chord(p):
        return line_chord(Line(line_theta, p), body)

    if a_seg and b_seg:
        p = (a + b) / 2
        return p, chord(p)
    # chord length is concave in the offset: golden-section search
    g = (math.sqrt(5) - 1) / 2
    x0, x1 = lo, hi
    for _ in range(80):
        m1, m2 = x1 - g * (x1 - x0), x0 + g * (x1 - x0)
        if chord(m1) < chord(m2):
            x0 = m1
        else:
            x1 = m2
    p = (x0 + x1) / 2
    return p, chord(p)


def witness_at(barrier: Barrier, theta: float, body: ConvexPolygon, min_clearance: float) -> Optional[WitnessLine]:
    lo, hi = body.offset_interval(theta)
    gaps = _merged_gaps([project_normal(s, theta) for s in barrier], lo, hi)
    for gap in gaps:
        best = _best_offset(theta, gap, body, min_clearance)
        if best is None:
            continue
        p, pen = best
        if pen < min_clearance:
            continue
        line = Line(theta, p)
        clr = line_clearance(line, barrier)
        if verify_witness(line, barrier, body, min_clearance):
            return WitnessLine(line, clr, pen)
    return None


def search_witness(barrier: Barrier, body: Optional[ConvexPolygon] = None,
                   angular_step: float = DEFAULT_STEP,
                   min_clearance: float = DEFAULT_CLEARANCE) -> WitnessSearch:
    if angular_step <= 0:
        raise ValueError("angular_step must be positive")
    body = body or unit_square()
    thetas = scan_angles(barrier, body, angular_step)
    widest = _gap_table(barrier, body, thetas)
    # deterministic order: smallest theta first
    for i in np.flatnonzero(widest >= 2 * min_clearance * (1 + 1e-9)):
        w = witness_at(barrier, float(thetas[i]), body, min_clearance)
        if w is not None:
            return WitnessSearch("witness", w, len(thetas), float(widest.max()))
    top = float(widest.max()) if len(widest) else 0.0
    status = "opaque" if top <= EPS else "inconclusive"
    return WitnessSearch(status, None, len(thetas), top)


def find_witness(barrier: Barrier, body: Optional[ConvexPolygon] = None,
                 angular_step: float = DEFAULT_STEP,
                 min_clearance: float = DEFAULT_CLEARANCE) -> Optional[WitnessLine]:
    return search_witness(barrier, body, angular_step, min_clearance).witness


def line_clearance(line: Line, barrier: Barrier) -> float:
    """Minimum distance from ``line`` to the barrier (0 if they meet)."""
    best = math.inf
    for s in barrier:
        da = line.signed_distance(s.a.xy)
        db = line.signed_distance(s.b.xy)
        if da * db <= 0:
            return 0.0
        best = min(best, abs(da), abs(db))
    return best


def _penetration_by_edges(line: Line, body: ConvexPolygon) -> float:
    # intersections of the line with the boundary edges, measured along the line
    dx, dy = line.direction
    ts = []
    for p, q in body.edges():
        dp, dq = line.signed_distance(p), line.signed_distance(q)
        if dp == dq:
            continue
        if (dp <= 0 <= dq) or (dq <= 0 <= dp):
            u = dp / (dp - dq)
            x, y = p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])
            ts.append(x * dx + y * dy)
    return max(ts) - min(ts) if ts else 0.0


def verify_witness(line: Line, barrier: Barrier, body: Optional[ConvexPolygon] = None,
                   min_clearance: float = DEFAULT_CLEARANCE) -> bool:
    """Independent re-check: point-line distances plus edge crossings."""
    body = body or unit_square()
    if line_clearance(line, barrier) < min_clearance:
        return False
    return _penetration_by_edges(line, body) >= min_clearance


class DirectionSlack(NamedTuple):
    d1: float
    d2: float
    x: float
    y: float


def main_direction_slack(barrier: Barrier) -> DirectionSlack:
    """Projection excess onto both diagonals and both axes of the unit square."""
    sums = [0.0, 0.0, 0.0, 0.0]
    for s in barrier:
        a = s.angle
        t = a - math.pi / 4  # angle to the first diagonal
        sums[0] += s.length * abs(math.cos(t))
        sums[1] += s.length * abs(math.sin(t))
        sums[2] += s.length * abs(math.cos(a))
        sums[3] += s.length * abs(math.sin(a))
    r2 = math.sqrt(2)
    return DirectionSlack(sums[0] - r2, sums[1] - r2, sums[2] - 1.0, sums[3] - 1.0)

"""The ADVANCE sweep and its advance budget.

A line anchored on the two horizontal sides of a bounding square starts at
x = w1 and only ever moves its anchors to the right:

1. while it is too close to a near-horizontal piece in the high band it
   rotates clockwise about the lower anchor; otherwise, while it is too close
   to one in the low band, it rotates counterclockwise about the upper anchor;
2. while it is too close to anything else it translates to the right.

Each move is computed in closed form: for a rotation the set of angles at
which a piece is within the clearance is an interval, for a translation the
set of offsets is one, and the line jumps to the end of the connected union
of these intervals (or to the first band piece it runs into).  The run ends
with a verified witness line, with an anchor reaching x = 1 - w1, or when the
event budget is spent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .geometry import XY, Barrier, Line, Point, classify, clip_params, line_chord, rectangle, unit_square
from .opacity import DEFAULT_CLEARANCE, WitnessLine, line_clearance, verify_witness

# a move stops where the clearance is slightly above the threshold, and a
# move into a band stops where it is slightly below, so no event is zero-length
_OUT = 1 + 1e-6
_IN = 1 - 1e-6


class Mode(str, Enum):
    U3 = "U3"
    U = "U"


@dataclass(frozen=True)
class AdvanceConfig:
    phi: float = math.asin(1e-4)
    w1: float = 1 / 20
    w2: float = 1 / 1000
    bounding_square: Mode = Mode.U3
    min_clearance: float = DEFAULT_CLEARANCE
    max_events: int = 10_000

    def __post_init__(self):
        if not 0 < self.w1 < 0.5:
            raise ValueError("w1 must lie in (0, 1/2)")
        if not 0 < self.phi < math.pi / 4:
            raise ValueError("phi must lie in (0, pi/4)")
        object.__setattr__(self, "bounding_square", Mode(self.bounding_square))

    @property
    def levels(self) -> Tuple[float, float]:
        return (-0.5, 1.5) if self.bounding_square is Mode.U3 else (0.0, 1.0)

    @property
    def band_margin(self) -> float:
        return self.w2 if self.bounding_square is Mode.U3 else 0.0


@dataclass(frozen=True)
class SweepEvent:
    kind: str  # rotate_cw | rotate_ccw | translate
    segment: int
    low_dx: float
    high_dx: float
    clamped: bool = False

    def to_dict(self) -> dict:
        return {"kind": self.kind, "segment": self.segment, "low_dx": self.low_dx,
                "high_dx": self.high_dx, "clamped": self.clamped}


@dataclass
class SweepState:
    anchor_low: Point
    anchor_high: Point
    event_log: List[SweepEvent] = field(default_factory=list)
    resweeps: Dict[int, int] = field(default_factory=dict)

    @property
    def line(self) -> Line:
        return Line.through(self.anchor_low.xy, self.anchor_high.xy)

    def advance_totals(self) -> Tuple[float, float]:
        return (math.fsum(e.low_dx for e in self.event_log),
                math.fsum(e.high_dx for e in self.event_log))


@dataclass(frozen=True)
class AdvanceResult:
    status: str  # success | exhausted | budget_exceeded
    state: SweepState
    witness: Optional[WitnessLine] = None


class AdvanceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# pieces


@dataclass(frozen=True)
class _Piece:
    seg: int
    kind: str  # high | low | other
    a: XY
    b: XY


def _pieces(barrier: Barrier, cfg: AdvanceConfig) -> List[_Piece]:
    m = cfg.band_margin
    low = rectangle(0, -m, 1, cfg.w1)
    high = rectangle(0, 1 - cfg.w1, 1, 1 + m)
    out = []
    for i, s in enumerate(barrier):
        if classify(s, cfg.phi).tag != "X":
            out.append(_Piece(i, "other", s.a.xy, s.b.xy))
            continue
        cuts = []
        for kind, box in (("low", low), ("high", high)):
            rng = clip_params(s, box, tol=0.0)
            if rng is not None and rng[1] > rng[0]:
                t0, t1 = max(rng[0], 0.0), min(rng[1], 1.0)
                if t1 > t0:
                    cuts.append((t0, t1, kind))
        cursor = 0.0
        for t0, t1, kind in sorted(cuts):
            if t0 > cursor:
                out.append(_Piece(i, "other", s.at(cursor), s.at(t0)))
            out.append(_Piece(i, kind, s.at(t0), s.at(t1)))
            cursor = max(cursor, t1)
        if cursor < 1.0:
            out.append(_Piece(i, "other", s.at(cursor), s.at(1.0)))
    return out


def _distance(line: Line, pc: _Piece) -> float:
    da, db = line.signed_distance(pc.a), line.signed_distance(pc.b)
    if (da <= 0 <= db) or (db <= 0 <= da):
        return 0.0
    return min(abs(da), abs(db))


def _point_piece_distance(p: XY, pc: _Piece) -> float:
    (ax, ay), (bx, by) = pc.a, pc.b
    dx, dy = bx - ax, by - ay
    dd = dx * dx + dy * dy
    t = 0.0 if dd == 0 else min(1.0, max(0.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / dd))
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


# ---------------------------------------------------------------------------
# blocking intervals in the motion parameter


def _rotation_interval(pivot: XY, level: float, pc: _Piece, c: float) -> Tuple[float, float]:
    """x-range of the moving anchor (on y = level) where the line through
    ``pivot`` comes within ``c`` of the piece."""
    if _point_piece_distance(pivot, pc) < c:
        return (-math.inf, math.inf)
    sigma = 1.0 if level > pivot[1] else -1.0
    height = abs(level - pivot[1])
    lo, hi = math.inf, -math.inf
    for e in (pc.a, pc.b):
        dx, dy = e[0] - pivot[0], max(sigma * (e[1] - pivot[1]), 0.0)
        t = math.atan2(dx, dy)
        r = math.hypot(e[0] - pivot[0], e[1] - pivot[1])
        d = math.asin(min(1.0, c / r))
        lo, hi = min(lo, t - d), max(hi, t + d)

    def to_x(t):
        if t >= math.pi / 2:
            return math.inf
        if t <= -math.pi / 2:
            return -math.inf
        return pivot[0] + height * math.tan(t)

    return to_x(lo), to_x(hi)


def _translation_interval(line: Line, pc: _Piece, c: float) -> Tuple[float, float]:
    """Range of rightward shifts s for which the shifted line is within ``c``."""
    nx = line.normal[0]
    pa, pb = line.offset_of(pc.a), line.offset_of(pc.b)
    lo, hi = min(pa, pb) - c - line.p, max(pa, pb) + c - line.p
    s1, s2 = lo / nx, hi / nx
    return min(s1, s2), max(s1, s2)


def _component_end(start: float, intervals: Sequence[Tuple[float, float, int]]) -> Tuple[float, int]:
    """Right end of the connected union of open intervals containing ``start``
    and the segment that defines it."""
    cur, who = start, -1
    for lo, hi, seg in sorted(intervals):
        if lo > cur:
            break
        if hi > cur:
            cur, who = hi, seg
    return cur, who


def _first_entry(start: float, intervals: Sequence[Tuple[float, float, int]]) -> Tuple[float, int]:
    best = (math.inf, -1)
    for lo, hi, seg in intervals:
        if lo > start and (lo, seg) < best:
            best = (lo, seg)
    return best


# ---------------------------------------------------------------------------
# the sweep


def run_advance(barrier: Barrier, config: Optional[AdvanceConfig] = None) -> AdvanceResult:
    cfg = config or AdvanceConfig()
    c = cfg.min_clearance
    ylo, yhi = cfg.levels
    x_stop = 1 - cfg.w1
    pieces = _pieces(barrier, cfg)
    high = [p for p in pieces if p.kind == "high"]
    low = [p for p in pieces if p.kind == "low"]
    bands = high + low
    state = SweepState(Point(cfg.w1, ylo), Point(cfg.w1, yhi))
    xl = xh = cfg.w1
    previously_hit: set = set()
    cleared: set = set()

    def finish(kind, seg, new_xl, new_xh):
        nonlocal xl, xh
        clamped = new_xl > x_stop or new_xh > x_stop
        new_xl, new_xh = min(new_xl, x_stop), min(new_xh, x_stop)
        state.event_log.append(SweepEvent(kind, seg, new_xl - xl, new_xh - xh, clamped))
        xl, xh = new_xl, new_xh
        state.anchor_low, state.anchor_high = Point(xl, ylo), Point(xh, yhi)
        return clamped or xl >= x_stop or xh >= x_stop

    while True:
        line = Line.through((xl, ylo), (xh, yhi))
        hits = [p for p in pieces if _distance(line, p) < c]
        hit_ids = {id(p) for p in hits}
        for p in hits:
            if id(p) in cleared:
                cleared.discard(id(p))
                state.resweeps[p.seg] = state.resweeps.get(p.seg, 0) + 1
        cleared |= previously_hit - hit_ids
        previously_hit = hit_ids
        if not hits:
            pen = line_chord(line, unit_square())
            if not verify_witness(line, barrier, unit_square(), c):
                raise AdvanceError("sweep stopped on a line that is not a witness")
            return AdvanceResult("success", state, WitnessLine(line, line_clearance(line, barrier), pen))
        if len(state.event_log) >= cfg.max_events:
            return AdvanceResult("budget_exceeded", state)

        if any(p.kind == "high" for p in hits):
            ivs = [(*_rotation_interval((xl, ylo), yhi, p, c * _OUT), p.seg) for p in high]
            end, seg = _component_end(xh, ivs)
            done = finish("rotate_cw", seg, xl, end)
        elif any(p.kind == "low" for p in hits):
            ivs = [(*_rotation_interval((xh, yhi), ylo, p, c * _OUT), p.seg) for p in low]
            end, seg = _component_end(xl, ivs)
            entry = [(*_rotation_interval((xh, yhi), ylo, p, c * _IN), p.seg) for p in high]
            stop, seg2 = _first_entry(xl, entry)
            if stop < end:
                end, seg = stop, seg2
            done = finish("rotate_ccw", seg, end, xh)
        else:
            others = [p for p in pieces if p.kind == "other"]
            ivs = [(*_translation_interval(line, p, c * _OUT), p.seg) for p in others]
            end, seg = _component_end(0.0, ivs)
            entry = [(*_translation_interval(line, p, c * _IN), p.seg) for p in bands]
            stop, seg2 = _first_entry(0.0, entry)
            if stop < end:
                end, seg = stop, seg2
            done = finish("translate", seg, xl + end, xh + end)
        if done:
            return AdvanceResult("exhausted", state)


# ---------------------------------------------------------------------------
# budget


@dataclass(frozen=True)
class AdvanceBudget:
    tan_beta: float
    x1: float
    x3: float
    x4: float
    y1: float
    y2: float
    translation_x: float
    translation_z: float
    total_advance: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def advance_budget(stats: Mapping[str, float], w1: float = 1 / 20, phi: float = math.asin(1e-4)) -> AdvanceBudget:
    """Upper bound on how far either anchor can move during a sweep.

    ``stats`` holds |X|, |Y|, |Z| and the band weights X_low, X_high,
    Y_left, Y_right (see :func:`opaque.audit.barrier_stats`).
    """
    x1 = stats["X"] - 0.45
    if x1 <= 0:
        raise ValueError("|X| <= 0.45: the barrier is outside the budget's hypotheses")
    sp, cp = math.sin(phi), math.cos(phi)
    tan_beta = (1.5 - w1 - x1 * sp) / (x1 * cp)
    if tan_beta <= 0:
        raise ValueError("non-positive slope bound")
    cot = 1 / tan_beta
    x3 = 2 * cot
    x4 = max(0.0, stats["X"] - stats["X_low"] - stats["X_high"])
    y1 = max(0.0, stats["Y"] - stats["Y_left"] - stats["Y_right"])
    # sin(b+phi)/sin b, cos(b-phi)/sin b and 1/sin b written through cot b
    tx = (cp + cot * sp) * x4
    y2 = (cot * cp + sp) * y1
    tz = math.sqrt(1 + cot * cot) * stats["Z"]
    return AdvanceBudget(tan_beta, x1, x3, x4, y1, y2, tx, tz, x3 + tx + y2 + tz)

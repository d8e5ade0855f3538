"""Canonical barriers of the unit square and the four-direction pinwheel."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .geometry import Barrier, Point, Segment

HALF = Fraction(1, 2)


class BarrierKind(str, Enum):
    THREE_SIDES = "three_sides"
    TWO_DIAGONALS = "two_diagonals"
    STEINER_CORNERS = "steiner_corners"
    CONJECTURED_OPTIMAL = "conjectured_optimal"
    IMPERFECT_FOUR_DIRECTION = "imperfect_four_direction"

    @classmethod
    def parse(cls, text: str) -> "BarrierKind":
        return cls(text.strip().lower().replace("-", "_"))


OPAQUE_KINDS = (
    BarrierKind.THREE_SIDES,
    BarrierKind.TWO_DIAGONALS,
    BarrierKind.STEINER_CORNERS,
    BarrierKind.CONJECTURED_OPTIMAL,
)


@dataclass(frozen=True)
class NamedBarrier:
    kind: BarrierKind
    barrier: Barrier
    closed_form_length: float


def _seg(x1, y1, x2, y2) -> Segment:
    return Segment(Point(x1, y1), Point(x2, y2))


def known_barrier(kind) -> NamedBarrier:
    kind = BarrierKind.parse(kind) if isinstance(kind, str) else kind
    r3 = math.sqrt(3)
    if kind is BarrierKind.THREE_SIDES:
        segs = [_seg(0, 0, 0, 1), _seg(0, 0, 1, 0), _seg(1, 0, 1, 1)]
        closed = 3.0
    elif kind is BarrierKind.TWO_DIAGONALS:
        segs = [_seg(0, 0, 1, 1), _seg(1, 0, 0, 1)]
        closed = 2 * math.sqrt(2)
    elif kind is BarrierKind.STEINER_CORNERS:
        # Steiner points at height sqrt(3)/6 above the bottom side and below
        # the top side, so every Steiner point has three edges at 120 degrees.
        lo = r3 / 6
        hi = 1 - r3 / 6
        segs = [
            _seg(0, 0, HALF, lo), _seg(1, 0, HALF, lo),
            _seg(HALF, lo, HALF, hi),
            _seg(0, 1, HALF, hi), _seg(1, 1, HALF, hi),
        ]
        closed = 1 + r3
    elif kind is BarrierKind.CONJECTURED_OPTIMAL:
        c = 0.5 - r3 / 6
        segs = [
            _seg(HALF, HALF, 1, 1),
            _seg(0, 1, c, c), _seg(0, 0, c, c), _seg(1, 0, c, c),
        ]
        closed = math.sqrt(2) + math.sqrt(6) / 2
    elif kind is BarrierKind.IMPERFECT_FOUR_DIRECTION:
        return imperfect_four_direction()
    else:  # pragma: no cover
        raise ValueError(f"unknown barrier kind {kind!r}")
    return NamedBarrier(kind, Barrier(tuple(segs), name=kind.value), closed)


def imperfect_four_direction() -> NamedBarrier:
    """Pinwheel of four half-sides, total length 2.

    Horizontal pieces tile [0, 1] on the x-axis, vertical ones tile [0, 1] on
    the y-axis, and the four pieces tile both diagonals without overlap, so
    the two axis and two diagonal directions are blocked with zero slack.
    """
    segs = [
        _seg(0, 0, HALF, 0),
        _seg(1, 0, 1, HALF),
        _seg(1, 1, HALF, 1),
        _seg(0, 1, 0, HALF),
    ]
    kind = BarrierKind.IMPERFECT_FOUR_DIRECTION
    return NamedBarrier(kind, Barrier(tuple(segs), name=kind.value), 2.0)

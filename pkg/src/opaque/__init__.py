"""Opaque barriers for the unit square: witness search, line measures, the
ADVANCE sweep, region audits and an exactly certified LP lower bound."""

__version__ = "0.1.0"

from .geometry import Barrier, ConvexPolygon, Line, Point, Segment, unit_square  # noqa: E402
from .opacity import find_witness, search_witness, verify_witness  # noqa: E402
from .constructions import BarrierKind, known_barrier  # noqa: E402

__all__ = [
    "Barrier", "ConvexPolygon", "Line", "Point", "Segment", "unit_square",
    "find_witness", "search_witness", "verify_witness",
    "BarrierKind", "known_barrier",
]

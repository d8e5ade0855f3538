"""JSON barrier files.

    {"segments": [[[x1, y1], [x2, y2]], ...], "name": "optional"}

Coordinates are JSON numbers or strings.  Strings are read exactly as
rationals ("1/2", "0.25"), numbers as the nearest double, so exact inputs
survive a parse/serialize round trip unchanged.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Union

from .geometry import Barrier, GeometryError, Point, Segment


class BarrierParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f" (line {line}, column {column})" if line else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


def _coord(v, where: str):
    if isinstance(v, bool):
        raise BarrierParseError(f"{where}: boolean is not a coordinate")
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise BarrierParseError(f"{where}: cannot read {v!r} as a rational") from None
    raise BarrierParseError(f"{where}: expected a number, got {type(v).__name__}")


def parse_barrier_file(data: Union[bytes, str]) -> Barrier:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise BarrierParseError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise BarrierParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or "segments" not in doc:
        raise BarrierParseError('expected an object with a "segments" list')
    segs = doc["segments"]
    if not isinstance(segs, list) or not segs:
        raise BarrierParseError('"segments" must be a non-empty list')
    out = []
    for i, s in enumerate(segs):
        try:
            (x1, y1), (x2, y2) = s
        except (TypeError, ValueError):
            raise BarrierParseError(f"segment {i}: expected [[x1, y1], [x2, y2]]") from None
        pts = [_coord(v, f"segment {i}") for v in (x1, y1, x2, y2)]
        try:
            out.append(Segment(Point(pts[0], pts[1]), Point(pts[2], pts[3])))
        except GeometryError as exc:
            raise BarrierParseError(f"segment {i}: {exc}") from None
    name = doc.get("name")
    return Barrier(tuple(out), name=str(name) if name is not None else None)


def _dump(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return v


def barrier_to_dict(barrier: Barrier) -> dict:
    doc = {"segments": [[[_dump(s.a.x), _dump(s.a.y)], [_dump(s.b.x), _dump(s.b.y)]] for s in barrier]}
    if barrier.name is not None:
        doc["name"] = barrier.name
    return doc


def serialize_barrier(barrier: Barrier, **extra) -> str:
    doc = barrier_to_dict(barrier)
    doc.update(extra)
    # one segment per line keeps files diffable
    segs = ",\n    ".join(json.dumps(s) for s in doc.pop("segments"))
    rest = "".join(f",\n  {json.dumps(k)}: {json.dumps(v)}" for k, v in doc.items())
    return "{\n  \"segments\": [\n    " + segs + "\n  ]" + rest + "\n}\n"

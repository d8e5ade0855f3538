"""Region geometry, barrier decomposition and structural-lemma evaluators.

Two families of regions live here:

* :class:`RegionsThm1` -- the squares, rotated squares, strips and thin
  rectangles used for local barriers (parameters delta, phi, w1, w2);
* :class:`RegionPartition13` -- the split of the unit square into a central
  octagon C0, eight triangles A1..A4 / B1..B4 and four corner
  quadrilaterals C1..C4 by eight cuts with legs ``w`` and 1/2.

Corners are numbered 1 = (0,0), 2 = (1,0), 3 = (1,1), 4 = (0,1).  A_i is the
piece of the corner-i cut triangle whose long leg runs along the horizontal
side, B_i the one along the vertical side, and C_i the overlap of the two cut
triangles at corner i.  With this numbering vertical lines with x in (w, 1/2)
cross exactly C0, A1 and A4, and horizontal lines with y in (w, 1/2) cross
exactly C0, B1 and B2, which is what the side-projection constraints need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .geometry import (
    EPS,
    XY,
    Barrier,
    ConvexPolygon,
    Point,
    Segment,
    classify,
    partition_lengths,
    rectangle,
)

CLASSES = ("X", "Y", "Z")
REGIONS = ("A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4", "C1", "C2", "C3", "C4", "C0")
VARIABLES = tuple(c + r for c in CLASSES for r in REGIONS)

MIN_W = 1e-4

CORNERS: Tuple[XY, ...] = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))

# maps taking corner 1 to corner i while keeping horizontal sides horizontal
_CORNER_MAPS: Tuple[Callable[[float, float], XY], ...] = (
    lambda x, y: (x, y),
    lambda x, y: (1 - x, y),
    lambda x, y: (1 - x, 1 - y),
    lambda x, y: (x, 1 - y),
)


class DecompositionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# regions for barriers local to the big square


HalfPlanes = Tuple[Tuple[XY, float], ...]


def _strip(n: XY, lo: float, hi: float) -> HalfPlanes:
    """{lo <= n.x <= hi} as two half-planes n.x >= c."""
    return ((n, lo), ((-n[0], -n[1]), -hi))


def length_in(seg: Segment, halfplanes: Iterable[Tuple[XY, float]]) -> float:
    """Length of the part of ``seg`` inside an intersection of half-planes."""
    (ax, ay), (bx, by) = seg.a.xy, seg.b.xy
    dx, dy = bx - ax, by - ay
    t0, t1 = 0.0, 1.0
    for (nx, ny), c in halfplanes:
        f0 = nx * ax + ny * ay - c
        df = nx * dx + ny * dy
        if df == 0:
            if f0 < 0:
                return 0.0
            continue
        t = -f0 / df
        if df > 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 >= t1:
            return 0.0
    return (t1 - t0) * seg.length


@dataclass(frozen=True)
class RegionsThm1:
    delta: float = 1e-12
    phi: float = math.asin(1e-4)
    w1: float = 1 / 20
    w2: float = 1 / 1000

    @property
    def U(self) -> ConvexPolygon:
        return rectangle(0, 0, 1, 1)

    @property
    def U1(self) -> ConvexPolygon:
        return rectangle(self.w1, self.w1, 1 - self.w1, 1 - self.w1)

    @property
    def U2(self) -> ConvexPolygon:
        return rectangle(-self.w2, -self.w2, 1 + self.w2, 1 + self.w2)

    @property
    def U3(self) -> ConvexPolygon:
        return rectangle(-0.5, -0.5, 1.5, 1.5)

    @property
    def Q1(self) -> ConvexPolygon:
        return ConvexPolygon([(0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 0.5)])

    @property
    def Q2(self) -> ConvexPolygon:
        return ConvexPolygon([(0.5, -0.5), (1.5, 0.5), (0.5, 1.5), (-0.5, 0.5)])

    @property
    def U_low(self) -> ConvexPolygon:
        return rectangle(0, -self.w2, 1, self.w1)

    @property
    def U_high(self) -> ConvexPolygon:
        return rectangle(0, 1 - self.w1, 1, 1 + self.w2)

    @property
    def U_left(self) -> ConvexPolygon:
        return rectangle(-self.w2, 0, self.w1, 1)

    @property
    def U_right(self) -> ConvexPolygon:
        return rectangle(1 - self.w1, 0, 1 + self.w2, 1)

    V: HalfPlanes = field(default=_strip((1.0, 0.0), 0.0, 1.0), init=False, repr=False)
    H: HalfPlanes = field(default=_strip((0.0, 1.0), 0.0, 1.0), init=False, repr=False)

    @property
    def pi_plus(self) -> HalfPlanes:
        # between the line through (1 - w1, 0), (1, 1/2) and its parallel through (1, 0)
        k = 1 / (2 * self.w1)
        n = (k, -1.0)
        return _strip(n, k * (1 - self.w1), k)

    @property
    def pi_minus(self) -> HalfPlanes:
        # mirror of pi_plus in y = 1/2
        k = 1 / (2 * self.w1)
        n = (k, 1.0)
        return _strip(n, k * (1 - self.w1) + 1, k + 1)


def _poly_halfplanes(poly: ConvexPolygon) -> HalfPlanes:
    out = []
    for (px, py), (qx, qy) in poly.edges():
        n = (-(qy - py), qx - px)
        out.append((n, n[0] * px + n[1] * py))
    return tuple(out)


# ---------------------------------------------------------------------------
# the 13-region partition


@dataclass(frozen=True)
class RegionPartition13:
    w: float
    regions: Dict[str, ConvexPolygon] = field(compare=False)
    cuts: Tuple[Tuple[XY, XY], ...] = field(compare=False)

    @property
    def psi(self) -> float:
        return math.atan(2 * self.w)

    @property
    def h(self) -> float:
        return 1 / math.sqrt(4 + self.w ** -2)


def build_partition(w: float) -> RegionPartition13:
    if not 0 < w < 0.5:
        raise ValueError("partition parameter w must lie in (0, 1/2)")
    if w < MIN_W:
        # the corner quadrilaterals have area ~ w^2, below the kernel's tolerance
        raise ValueError(f"partition parameter w must be at least {MIN_W:g}")
    q = w / (1 + 2 * w)  # where the two cuts at a corner cross
    regions: Dict[str, ConvexPolygon] = {}
    cuts = []
    for i, f in enumerate(_CORNER_MAPS, start=1):
        regions[f"A{i}"] = ConvexPolygon([f(w, 0), f(0.5, 0), f(q, q)])
        regions[f"B{i}"] = ConvexPolygon([f(0, w), f(q, q), f(0, 0.5)])
        regions[f"C{i}"] = ConvexPolygon([f(0, 0), f(w, 0), f(q, q), f(0, w)])
        cuts.append((f(0.5, 0), f(0, w)))
        cuts.append((f(w, 0), f(0, 0.5)))
    f1, f2, f3, f4 = _CORNER_MAPS
    regions["C0"] = ConvexPolygon([
        f1(0.5, 0), f2(q, q), f2(0, 0.5), f3(q, q),
        f3(0.5, 0), f4(q, q), f4(0, 0.5), f1(q, q),
    ])
    return RegionPartition13(w, regions, tuple(cuts))


@dataclass
class DecompositionVector:
    values: Dict[str, float]
    outside: float = 0.0

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def total(self) -> float:
        return math.fsum(self.values.values())

    def group(self, cls: str, regions: Iterable[str]) -> float:
        """Sum over ``cls`` (any subset of "XYZ") and the given region labels."""
        return math.fsum(self.values[c + r] for c in cls for r in regions)

    def as_list(self) -> List[float]:
        return [self.values[v] for v in VARIABLES]

    def to_dict(self) -> dict:
        return {"values": {v: self.values[v] for v in VARIABLES}, "outside": self.outside}


def decompose(barrier: Barrier, partition: RegionPartition13, phi: float,
              strict: bool = True) -> DecompositionVector:
    values = {v: 0.0 for v in VARIABLES}
    outside = 0.0
    for s in barrier:
        tag = classify(s, phi).tag
        lengths, out = partition_lengths(s, partition.regions)
        for lab, length in lengths.items():
            values[tag + lab] += length
        outside += out
    if strict and outside > EPS:
        raise DecompositionError(f"barrier has {outside:.3g} length outside the unit square")
    return DecompositionVector(values, outside)


# ---------------------------------------------------------------------------
# symmetries of the square


SYMMETRIES: Dict[str, Callable] = {
    "id": lambda x, y: (x, y),
    "r90": lambda x, y: (1 - y, x),
    "r180": lambda x, y: (1 - x, 1 - y),
    "r270": lambda x, y: (y, 1 - x),
    "fx": lambda x, y: (1 - x, y),
    "fy": lambda x, y: (x, 1 - y),
    "d1": lambda x, y: (y, x),
    "d2": lambda x, y: (1 - y, 1 - x),
}
_SWAPS_AXES = {"r90", "r270", "d1", "d2"}


def apply_symmetry(barrier: Barrier, g: str) -> Barrier:
    """Image of ``barrier`` under one of the 8 symmetries of the unit square.

    Exact (Fraction) coordinates stay exact.
    """
    fn = SYMMETRIES[g]
    segs = tuple(Segment(Point(*fn(s.a.x, s.a.y)), Point(*fn(s.b.x, s.b.y))) for s in barrier)
    return Barrier(segs, name=barrier.name)


def _corner_perm(g: str) -> Dict[int, int]:
    fn = SYMMETRIES[g]
    return {i + 1: CORNERS.index(tuple(float(c) for c in fn(*CORNERS[i]))) + 1 for i in range(4)}


def permute_variables(g: str) -> Dict[str, str]:
    """Where each decomposition entry moves when the barrier is mapped by ``g``."""
    perm = _corner_perm(g)
    swap = g in _SWAPS_AXES
    out = {}
    for cls in CLASSES:
        new_cls = {"X": "Y", "Y": "X"}.get(cls, cls) if swap else cls
        for r in REGIONS:
            kind, idx = r[0], int(r[1])
            if idx == 0:
                new_r = "C0"
            else:
                if swap and kind in "AB":
                    kind = "B" if kind == "A" else "A"
                new_r = f"{kind}{perm[idx]}"
            out[cls + r] = new_cls + new_r
    return out


def permute_decomposition(vec: DecompositionVector, g: str) -> DecompositionVector:
    mapping = permute_variables(g)
    return DecompositionVector({mapping[k]: v for k, v in vec.values.items()}, vec.outside)


def wlog_symmetry(vec: DecompositionVector) -> str:
    """A symmetry after which |X∩(A1∪A2)| >= |X∩(A3∪A4)| and |Y∩(B1∪B4)| >= |Y∩(B2∪B3)|."""
    g = "id"
    if vec.group("X", ("A1", "A2")) < vec.group("X", ("A3", "A4")):
        g = "fy"
    if vec.group("Y", ("B1", "B4")) < vec.group("Y", ("B2", "B3")):
        g = "fx" if g == "id" else "r180"
    return g


# ---------------------------------------------------------------------------
# lemma evaluators


@dataclass(frozen=True)
class LemmaCheck:
    lemma: str
    quantity: str
    lhs: float
    relation: str
    rhs: float

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.rhs if self.relation == "<=" else self.lhs >= self.rhs

    def to_dict(self) -> dict:
        return {"lemma": self.lemma, "quantity": self.quantity, "lhs": self.lhs,
                "relation": self.relation, "rhs": self.rhs, "satisfied": self.satisfied}


@dataclass(frozen=True)
class LemmaReport:
    length: float
    hypotheses_apply: bool
    checks: Tuple[LemmaCheck, ...]
    measured: Dict[str, float]

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.checks)

    def violated(self) -> List[LemmaCheck]:
        return [c for c in self.checks if not c.satisfied]

    def to_dict(self) -> dict:
        return {
            "length": self.length,
            "hypotheses_apply": self.hypotheses_apply,
            "all_satisfied": self.all_satisfied,
            "checks": [c.to_dict() for c in self.checks],
            "measured": dict(self.measured),
        }


def class_lengths(barrier: Barrier, phi: float, halfplanes: Optional[HalfPlanes] = None) -> Dict[str, float]:
    out = {"X": 0.0, "Y": 0.0, "Z": 0.0}
    for s in barrier:
        tag = classify(s, phi).tag
        out[tag] += s.length if halfplanes is None else length_in(s, halfplanes)
    return out


def barrier_stats(barrier: Barrier, regions: Optional[RegionsThm1] = None) -> Dict[str, float]:
    """Lengths feeding the advance budget: |X|, |Y|, |Z| and band weights."""
    R = regions or RegionsThm1()
    total = class_lengths(barrier, R.phi)
    low = class_lengths(barrier, R.phi, _poly_halfplanes(R.U_low))
    high = class_lengths(barrier, R.phi, _poly_halfplanes(R.U_high))
    left = class_lengths(barrier, R.phi, _poly_halfplanes(R.U_left))
    right = class_lengths(barrier, R.phi, _poly_halfplanes(R.U_right))
    return {
        "X": total["X"], "Y": total["Y"], "Z": total["Z"],
        "X_low": low["X"], "X_high": high["X"],
        "Y_left": left["Y"], "Y_right": right["Y"],
    }


def evaluate_thm1_lemmas(barrier: Barrier, regions: Optional[RegionsThm1] = None,
                         I: Optional[Tuple[float, float]] = None,
                         J: Optional[Tuple[float, float]] = None) -> LemmaReport:
    """Evaluate the structural inequalities for a local barrier of length near 2.

    ``I`` and ``J`` are the intervals fed to the strip-weight inequality;
    defaults are [1 - w, 1] with w = w1 + w2/10 and the band of half-width
    w2 / (2 w1) around 1/2.
    """
    R = regions or RegionsThm1()
    sp = math.sin(R.phi)
    L = barrier.length
    w = R.w1 + R.w2 / 10
    I = I or (1 - w, 1.0)
    J = J or (0.5 - R.w2 / (2 * R.w1), 0.5 + R.w2 / (2 * R.w1))
    tot = class_lengths(barrier, R.phi)
    X, Y, Z = tot["X"], tot["Y"], tot["Z"]
    x_in_V = class_lengths(barrier, R.phi, R.V)["X"]
    y_in_H = class_lengths(barrier, R.phi, R.H)["Y"]
    x_in_I = class_lengths(barrier, R.phi, _strip((1.0, 0.0), *I))["X"]
    y_in_J = class_lengths(barrier, R.phi, _strip((0.0, 1.0), *J))["Y"]
    outside_Q2 = L - math.fsum(length_in(s, _poly_halfplanes(R.Q2)) for s in barrier)
    outside_U2 = L - math.fsum(length_in(s, _poly_halfplanes(R.U2)) for s in barrier)
    stats = barrier_stats(barrier, R)

    def overlap01(iv):
        return max(0.0, min(iv[1], 1.0) - max(iv[0], 0.0))

    checks = [
        LemmaCheck("length_bracket", "|Γ| lower", L, ">=", 2.0),
        LemmaCheck("length_bracket", "|Γ| upper", L, "<=", 2.0 + R.delta),
        LemmaCheck("diagonal_mass", "|Z|", Z, "<=", 2 * sp),
        LemmaCheck("axis_mass", "|X| upper", X, "<=", 1 + 1.5 * sp),
        LemmaCheck("axis_mass", "|X| lower", X, ">=", 1 - 3.5 * sp),
        LemmaCheck("axis_mass", "|Y| upper", Y, "<=", 1 + 1.5 * sp),
        LemmaCheck("axis_mass", "|Y| lower", Y, ">=", 1 - 3.5 * sp),
        LemmaCheck("off_strip", "|X outside V|", X - x_in_V, "<=", 4.5 * sp),
        LemmaCheck("off_strip", "|Y outside H|", Y - y_in_H, "<=", 4.5 * sp),
        LemmaCheck("interval_weight", "|X in I x R|", x_in_I, "<=", overlap01(I) + 5 * sp),
        LemmaCheck("interval_weight", "|Y in R x J|", y_in_J, "<=", overlap01(J) + 5 * sp),
        LemmaCheck("outside_q2", "|Γ outside Q2|", outside_Q2, "<=", 4 * R.delta),
        LemmaCheck("outside_u2", "|Γ outside U2|", outside_U2, "<=", (5e5 + 2) * R.delta),
        LemmaCheck("band_weight", "|X in U_low|", stats["X_low"], ">=", 0.45),
        LemmaCheck("band_weight", "|X in U_high|", stats["X_high"], ">=", 0.45),
        LemmaCheck("band_weight", "|Y in U_left|", stats["Y_left"], ">=", 0.45),
        LemmaCheck("band_weight", "|Y in U_right|", stats["Y_right"], ">=", 0.45),
    ]
    hyp = checks[0].satisfied and checks[1].satisfied
    measured = {"X": X, "Y": Y, "Z": Z, "right_strip_weight": _right_strip_weight(barrier, R)}
    return LemmaReport(L, hyp, tuple(checks), measured)


def _right_strip_weight(barrier: Barrier, R: RegionsThm1) -> float:
    # |Y ∩ H ∩ U2 ∩ (Π+ ∪ Π-)|, the quantity bounded below on the right side
    base = R.H + _poly_halfplanes(R.U2)
    total = 0.0
    for s in barrier:
        if classify(s, R.phi).tag != "Y":
            continue
        a = length_in(s, base + R.pi_plus)
        b = length_in(s, base + R.pi_minus)
        ab = length_in(s, base + R.pi_plus + R.pi_minus)
        total += a + b - ab
    return total

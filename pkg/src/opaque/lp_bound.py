"""The 39-variable linear program behind the interior-barrier lower bound.

Every irrational coefficient is enclosed with interval arithmetic and then
rounded to a dyadic rational in the direction that can only enlarge the
feasible set (left-hand sides up, right-hand sides down), so the exact
optimum of the rounded LP is a valid lower bound.  The LP is solved exactly
over :class:`fractions.Fraction`, and the bound is backed by a dual
certificate that :func:`check_dual_certificate` re-verifies with nothing but
exact matrix-vector products.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from mpmath import iv

from .audit import REGIONS, VARIABLES

_INDEX = {v: i for i, v in enumerate(VARIABLES)}

# 7-decimal solution table printed with the original computation
PUBLISHED: Dict[str, Fraction] = {
    k: Fraction(v) for k, v in (
        ("XA1", "0.2762651"), ("XA2", "0.0726680"), ("XA3", "0.1076756"), ("XA4", "0.0419541"),
        ("XB1", "0"), ("XB2", "0.0227020"), ("XB3", "0"), ("XB4", "0"),
        ("XC1", "0.1177023"), ("XC2", "0.0292085"), ("XC3", "0.1469319"), ("XC4", "0.0481085"),
        ("XC0", "0.1096004"),
        ("YA1", "0"), ("YA2", "0"), ("YA3", "0"), ("YA4", "0.0911907"),
        ("YB1", "0.1297475"), ("YB2", "0.1903349"), ("YB3", "0"), ("YB4", "0.2869624"),
        ("YC1", "0.0271035"), ("YC2", "0.1387073"), ("YC3", "0.0803509"), ("YC4", "0.0520305"),
        ("YC0", "0"),
        ("ZA1", "0"), ("ZA2", "0"), ("ZA3", "0"), ("ZA4", "0"),
        ("ZB1", "0"), ("ZB2", "0"), ("ZB3", "0"), ("ZB4", "0"),
        ("ZC1", "0"), ("ZC2", "0"), ("ZC3", "0"), ("ZC4", "0"), ("ZC0", "0.0307674"),
    )
}
PUBLISHED_OPTIMUM = Fraction("2.0000113")


class LpError(RuntimeError):
    pass


class Infeasible(LpError):
    pass


class Unbounded(LpError):
    pass


class CertificateError(ValueError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class LpParameters:
    """``w`` and ``phi_deg`` are exact rationals (phi in degrees)."""

    w: Fraction = Fraction("0.1793")
    phi_deg: Fraction = Fraction("1.5589")

    def __post_init__(self):
        object.__setattr__(self, "w", Fraction(self.w))
        object.__setattr__(self, "phi_deg", Fraction(self.phi_deg))
        if not 0 < self.w < Fraction(1, 2):
            raise ValueError("w must lie in (0, 1/2)")
        if not self.phi_deg > 0:
            raise ValueError("phi must be positive")
        if not math.radians(self.phi_deg) < math.atan(2 * self.w):
            raise ValueError("phi must be smaller than psi = atan(2w)")

    @property
    def psi(self) -> float:
        return math.atan(2 * self.w)

    @property
    def beta(self) -> float:
        return math.atan(1 / (1 - 2 * self.w))

    @property
    def h(self) -> float:
        return 1 / math.sqrt(4 + float(self.w) ** -2)


@dataclass(frozen=True)
class Constraint:
    name: str
    coefs: Tuple[Tuple[int, Fraction], ...]  # sparse (variable index, coefficient)
    rhs: Fraction

    def lhs(self, x: Sequence) -> Fraction:
        return sum((c * x[j] for j, c in self.coefs), Fraction(0))


@dataclass(frozen=True)
class LinearProgram:
    """minimize 1.x subject to A x >= b, x >= 0."""

    constraints: Tuple[Constraint, ...]
    params: LpParameters
    precision_bits: int
    variables: Tuple[str, ...] = VARIABLES

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.constraints), len(self.variables)

    def dense(self) -> List[List[Fraction]]:
        rows = []
        for c in self.constraints:
            r = [Fraction(0)] * len(self.variables)
            for j, v in c.coefs:
                r[j] += v
            rows.append(r)
        return rows

    @property
    def rhs(self) -> List[Fraction]:
        return [c.rhs for c in self.constraints]

    def restricted(self, names: Sequence[str]) -> "LinearProgram":
        """The relaxation keeping only the named constraints."""
        keep = tuple(c for c in self.constraints if c.name in set(names))
        return LinearProgram(keep, self.params, self.precision_bits, self.variables)


@dataclass(frozen=True)
class DualCertificate:
    multipliers: Tuple[Fraction, ...]
    certified_bound: Fraction

    def to_json(self, lp: LinearProgram) -> str:
        return json.dumps({
            "multipliers": {c.name: _frac_str(y) for c, y in zip(lp.constraints, self.multipliers)},
            "certified_bound": _frac_str(self.certified_bound),
            "certified_bound_float": float(self.certified_bound),
            "precision_bits": lp.precision_bits,
        }, indent=2)

    @classmethod
    def from_json(cls, text: str, lp: LinearProgram) -> "DualCertificate":
        data = json.loads(text)
        ys = tuple(Fraction(data["multipliers"][c.name]) for c in lp.constraints)
        return cls(ys, Fraction(data["certified_bound"]))


@dataclass(frozen=True)
class LpSolution:
    optimum: Fraction
    primal: Tuple[Fraction, ...]
    dual: DualCertificate
    pivots: int

    def primal_dict(self) -> Dict[str, Fraction]:
        return dict(zip(VARIABLES, self.primal))


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


# ---------------------------------------------------------------------------
# directed rounding


def _endpoint(raw) -> Fraction:
    sign, man, exp, _ = raw
    q = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -q if sign else q


def _enclosure(x) -> Tuple[Fraction, Fraction]:
    a, b = x._mpi_
    return _endpoint(a), _endpoint(b)


def round_up(x, bits: int) -> Fraction:
    """Smallest multiple of 2**-bits that is >= every point of ``x``."""
    if isinstance(x, (int, Fraction)):
        return Fraction(math.ceil(Fraction(x) * 2 ** bits), 2 ** bits)
    return Fraction(math.ceil(_enclosure(x)[1] * 2 ** bits), 2 ** bits)


def round_down(x, bits: int) -> Fraction:
    if isinstance(x, (int, Fraction)):
        return Fraction(math.floor(Fraction(x) * 2 ** bits), 2 ** bits)
    return Fraction(math.floor(_enclosure(x)[0] * 2 ** bits), 2 ** bits)


def _ivq(q: Fraction):
    return iv.mpf(q.numerator) / q.denominator


# ---------------------------------------------------------------------------
# constraints


def _complement(*excluded: str) -> List[str]:
    return [r for r in REGIONS if r not in excluded]


def build_interior_lp(params: Optional[LpParameters] = None, precision_bits: int = 64) -> LinearProgram:
    if precision_bits < 32:
        raise ValueError("precision_bits must be >= 32")
    params = params or LpParameters()
    bits = precision_bits
    w = params.w
    saved = iv.prec
    iv.prec = 2 * bits + 64
    try:
        phi = _ivq(params.phi_deg) * iv.pi / 180
        sp, cp = iv.sin(phi), iv.cos(phi)
        W = _ivq(w)
        r2 = iv.sqrt(2)
        # psi = atan 2w and beta = atan 1/(1-2w), expressed algebraically
        cos_psi = 1 / iv.sqrt(1 + 4 * W * W)
        sin_psi = 2 * W * cos_psi
        k = 1 - 2 * W  # cot beta
        f_x = cp + k * sp            # sin(beta+phi)/sin(beta)
        f_y = k * cp + sp            # cos(beta-phi)/sin(beta)
        f_z = iv.sqrt(1 + k * k)     # 1/sin(beta)
        diag = (cp + sp) / r2        # cos(pi/4 - phi)
        coef = {
            "sides": cp + sp,        # sqrt2 cos(pi/4 - phi)
            "r2": r2,
            "r2cos": r2 * cp,
            "sin": sp,
            "cos": cp,
            "diag": diag,
            "cpsi": cos_psi * cp + sin_psi * sp,   # cos(psi - phi)
            "spsi": sin_psi * cp + cos_psi * sp,   # sin(psi + phi)
            "fx": f_x,
            "fx_w": f_x / (1 - W),
            "fy": f_y,
            "fz": f_z,
        }
        up = {name: round_up(v, bits) for name, v in coef.items()}
        rhs_h = round_down(1 / iv.sqrt(4 + 1 / (W * W)), bits)
        rhs_r2 = round_down(2 * r2, bits)
        rhs_q = round_down(r2 / 4, bits)
        rhs_3q = round_down(3 * r2 / 4, bits)
    finally:
        iv.prec = saved

    one = Fraction(1)
    rows: List[Constraint] = []

    def add(name: str, terms: Mapping[str, Fraction], rhs: Fraction):
        rows.append(Constraint(name, tuple(sorted((_INDEX[v], c) for v, c in terms.items())), rhs))

    def over(regions: Sequence[str], cx, cy, cz) -> Dict[str, Fraction]:
        d: Dict[str, Fraction] = {}
        for r in regions:
            for cls, c in (("X", cx), ("Y", cy), ("Z", cz)):
                if c:
                    d[cls + r] = d.get(cls + r, 0) + c
        return d

    half = Fraction(1, 2)
    # projections on the two sides and on the two diagonals
    add("xy", over(REGIONS, up["sides"], up["sides"], up["r2"]), Fraction(2))
    add("zz", over(REGIONS, up["r2"], up["r2"], up["r2cos"]), rhs_r2)
    # side projections restricted to the middle stretch [w, 1 - w]
    add("x+a", over(["C0", "A1", "A2", "A3", "A4"], one, up["sin"], up["cos"]), 1 - 2 * w)
    add("y+b", over(["C0", "B1", "B2", "B3", "B4"], up["sin"], one, up["cos"]), 1 - 2 * w)
    # half stretches: A1, A4 sit over [w, 1/2] on the left, A2, A3 on the right
    add("x+aii[14]", over(["C0", "A1", "A4"], one, up["sin"], up["cos"]), half - w)
    add("x+aii[23]", over(["C0", "A2", "A3"], one, up["sin"], up["cos"]), half - w)
    # B1, B2 sit beside [w, 1/2] at the bottom, B3, B4 at the top
    add("y+bii[12]", over(["C0", "B1", "B2"], up["sin"], one, up["cos"]), half - w)
    add("y+bii[34]", over(["C0", "B3", "B4"], up["sin"], one, up["cos"]), half - w)
    # everything except the strip [0, w] on one side
    add("x-bcii[14]", over(_complement("B1", "C1", "B4", "C4"), one, up["sin"], up["cos"]), 1 - w)
    add("x-bcii[23]", over(_complement("B2", "C2", "B3", "C3"), one, up["sin"], up["cos"]), 1 - w)
    add("y-acii[12]", over(_complement("A1", "C1", "A2", "C2"), up["sin"], one, up["cos"]), 1 - w)
    add("y-acii[34]", over(_complement("A3", "C3", "A4", "C4"), up["sin"], one, up["cos"]), 1 - w)
    # diagonal projections near each corner and away from it
    for i in "1234":
        add(f"z+i[{i}]", over(["C0", "A" + i, "B" + i, "C" + i], up["diag"], up["diag"], one), rhs_q)
    for i in "1234":
        add(f"z-i[{i}]", over(_complement("A" + i, "B" + i, "C" + i), up["diag"], up["diag"], one), rhs_3q)
    # projections along the two hypotenuses at each corner
    for i in "1234":
        add(f"cb+i[{i}]", over(["B" + i, "C" + i], up["cpsi"], up["spsi"], one), rhs_h)
    for i in "1234":
        add(f"ca+i[{i}]", over(["A" + i, "C" + i], up["spsi"], up["cpsi"], one), rhs_h)
    # symmetry normalisation
    add("xa1234", {"XA1": one, "XA2": one, "XA3": -one, "XA4": -one}, Fraction(0))
    add("yb1423", {"YB1": one, "YB4": one, "YB2": -one, "YB3": -one}, Fraction(0))
    # a line through the middle stretch that is not blocked must exist otherwise
    adv: Dict[str, Fraction] = {"XA1": up["fx_w"], "XA2": up["fx_w"], "XC0": up["fx"]}
    for r in ["C0", "A1", "A2", "A3", "A4"]:
        adv["Y" + r] = up["fy"]
        adv["Z" + r] = up["fz"]
    add("advancex", adv, 1 - 2 * w)
    adv = {"YB1": up["fx_w"], "YB4": up["fx_w"], "YC0": up["fx"]}
    for r in ["C0", "B1", "B2", "B3", "B4"]:
        adv["X" + r] = up["fy"]
        adv["Z" + r] = up["fz"]
    add("advancey", adv, 1 - 2 * w)
    return LinearProgram(tuple(rows), params, precision_bits)


SYMMETRIC_CONSTRAINTS = 30
_WLOG = ("xa1234", "yb1423")
# the region swaps that exchange the two halves each advance row favours
_ADVANCE_MIRROR = {
    "advancex": {"XA1": "XA4", "XA2": "XA3"},
    "advancey": {"YB1": "YB2", "YB4": "YB3"},
}


# ---------------------------------------------------------------------------
# exact simplex


def solve_exact(lp: LinearProgram) -> LpSolution:
    """Exact optimum via the dual  max b.y  s.t.  A^T y <= 1,  y >= 0.

    The slack basis is dual feasible from the start (the costs are all 1), so
    no phase one is needed.  Bland's rule prevents cycling.  The primal is read
    off the reduced costs of the slack columns.
    """
    A = lp.dense()
    b = lp.rhs
    m, n = len(A), len(lp.variables)
    # tableau rows: one per primal variable j:  sum_i A[i][j] y_i + s_j = 1
    width = m + n
    T = [[A[i][j] for i in range(m)] + [Fraction(int(k == j)) for k in range(n)] + [Fraction(1)]
         for j in range(n)]
    basis = [m + j for j in range(n)]
    # reduced-cost row for maximisation: d_k = c_k - c_B B^-1 a_k
    d = list(b) + [Fraction(0)] * n
    value = Fraction(0)
    pivots = 0
    while True:
        enter = next((k for k in range(width) if d[k] > 0), None)
        if enter is None:
            break
        best = None
        for r in range(n):
            a = T[r][enter]
            if a > 0:
                ratio = T[r][width] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            raise Infeasible("dual unbounded: the primal LP has no feasible point")
        r = best[1]
        piv = T[r][enter]
        row = [v / piv for v in T[r]]
        T[r] = row
        for q in range(n):
            if q != r and T[q][enter] != 0:
                f = T[q][enter]
                Tq = T[q]
                T[q] = [Tq[k] - f * row[k] for k in range(width + 1)]
        f = d[enter]
        d = [d[k] - f * row[k] for k in range(width)]
        value += f * row[width]
        basis[r] = enter
        pivots += 1

    y = [Fraction(0)] * m
    for r, k in enumerate(basis):
        if k < m:
            y[k] = T[r][width]
    x = tuple(-d[m + j] for j in range(n))
    cert = DualCertificate(tuple(y), sum((bi * yi for bi, yi in zip(b, y)), Fraction(0)))
    optimum = sum(x, Fraction(0))
    # exact optimality checks: primal feasibility, dual feasibility, no gap
    if any(v < 0 for v in x) or any(c.lhs(x) < c.rhs for c in lp.constraints):
        raise LpError("primal solution is infeasible")
    if check_dual_certificate(lp, cert) != optimum or value != optimum:
        raise LpError("duality gap at reported optimum")
    return LpSolution(optimum, x, cert, pivots)


def check_dual_certificate(lp: LinearProgram, cert: DualCertificate) -> Fraction:
    """Verify y >= 0 and A^T y <= 1 exactly and return the certified bound b.y."""
    y = cert.multipliers
    if len(y) != len(lp.constraints):
        raise CertificateError("certificate has the wrong number of multipliers", -1)
    for i, v in enumerate(y):
        if v < 0:
            raise CertificateError(f"multiplier {lp.constraints[i].name} is negative", i)
    col = [Fraction(0)] * len(lp.variables)
    for c, yi in zip(lp.constraints, y):
        if yi:
            for j, a in c.coefs:
                col[j] += a * yi
    for j, v in enumerate(col):
        if v > 1:
            raise CertificateError(f"dual constraint of {lp.variables[j]} is violated", j)
    return sum((c.rhs * yi for c, yi in zip(lp.constraints, y)), Fraction(0))


# ---------------------------------------------------------------------------
# reporting helpers


@dataclass(frozen=True)
class Regression:
    deviations: Dict[str, float]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values())

    @property
    def worst(self) -> str:
        return max(self.deviations, key=self.deviations.get)


def primal_regression(primal: Sequence[Fraction]) -> Regression:
    return Regression({v: abs(float(primal[i] - PUBLISHED[v])) for i, v in enumerate(VARIABLES)})


@dataclass(frozen=True)
class Residual:
    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


def evaluate_constraints(lp: LinearProgram, values: Mapping[str, float]) -> List[Residual]:
    """Float residuals of every constraint at a decomposition vector."""
    x = [float(values[v]) for v in lp.variables]
    out = []
    for c in lp.constraints:
        lhs = math.fsum(float(a) * x[j] for j, a in c.coefs)
        out.append(Residual(c.name, lhs, float(c.rhs)))
    return out


def symmetric_residuals(lp: LinearProgram, values: Mapping[str, float]) -> List[Residual]:
    """Residuals of the constraints that hold in every orientation.

    These are the projection rows plus the two advance rows in their
    disjunctive form: of an advance row and its mirror image at least one
    must hold, and the WLOG rows only choose which.  The lhs reported for an
    advance row is the larger of the two.
    """
    out = []
    for r, c in zip(evaluate_constraints(lp, values), lp.constraints):
        if c.name in _WLOG:
            continue
        if c.name in _ADVANCE_MIRROR:
            swap = _ADVANCE_MIRROR[c.name]
            swap = {**swap, **{b: a for a, b in swap.items()}}
            mirrored = {v: values[swap.get(v, v)] for v in lp.variables}
            r = Residual(c.name, max(r.lhs, evaluate_constraints(lp, mirrored)[lp.constraints.index(c)].lhs), r.rhs)
        out.append(r)
    return out


def _decimal(q: Fraction) -> str:
    """Exact decimal expansion (the denominators here are 2^a 5^b)."""
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return repr(float(q))
    digits = max(twos, fives)
    scaled = abs(q.numerator) * 10 ** digits // q.denominator
    text = str(scaled).rjust(digits + 1, "0")
    body = text[:-digits] + "." + text[-digits:] if digits else text
    body = body.rstrip("0").rstrip(".") if digits else body
    return ("-" if q < 0 else "") + body


def to_lp_format(lp: LinearProgram) -> str:
    """CPLEX LP text with exact decimal coefficients."""
    lines = ["\\ 39-variable interior barrier LP", "Minimize", " obj: " + " + ".join(lp.variables),
             "Subject To"]
    for c in lp.constraints:
        terms = []
        for j, a in c.coefs:
            sign = "-" if a < 0 else "+"
            terms.append(f"{sign} {_decimal(abs(a))} {lp.variables[j]}")
        body = " ".join(terms).lstrip("+ ")
        name = c.name.replace("[", "_").replace("]", "").replace("+", "p").replace("-", "m")
        lines.append(f" {name}: {body} >= {_decimal(c.rhs)}")
    lines.append("Bounds")
    lines += [f" {v} >= 0" for v in lp.variables]
    lines.append("End")
    return "\n".join(lines) + "\n"

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from opaque.audit import VARIABLES
from opaque.lp_bound import (
    PUBLISHED,
    SYMMETRIC_CONSTRAINTS,
    CertificateError,
    DualCertificate,
    LpParameters,
    build_interior_lp,
    check_dual_certificate,
    evaluate_constraints,
    primal_regression,
    round_down,
    round_up,
    solve_exact,
    symmetric_residuals,
    to_lp_format,
)


def test_shape_and_order():
    lp = build_interior_lp()
    assert lp.shape == (32, 39)
    names = [c.name for c in lp.constraints]
    assert names[:2] == ["xy", "zz"]
    assert names[-4:] == ["xa1234", "yb1423", "advancex", "advancey"]
    assert SYMMETRIC_CONSTRAINTS == 30
    res = symmetric_residuals(lp, PUBLISHED)
    assert len(res) == SYMMETRIC_CONSTRAINTS
    assert {r.name for r in res} == set(names) - {"xa1234", "yb1423"}


def test_symmetric_advance_rows_take_the_better_half():
    lp = build_interior_lp()
    vals = {v: 0.0 for v in VARIABLES}
    vals["XA3"] = 1.0
    res = {r.name: r for r in symmetric_residuals(lp, vals)}
    raw = {r.name: r for r in evaluate_constraints(lp, vals)}
    assert raw["advancex"].lhs == 0.0
    assert res["advancex"].lhs == pytest.approx(float(dict(lp.constraints[-2].coefs)[VARIABLES.index("XA1")]))


def test_parameter_validation():
    with pytest.raises(ValueError):
        LpParameters(w=Fraction(1, 2))
    with pytest.raises(ValueError):
        LpParameters(phi_deg=0)
    with pytest.raises(ValueError):
        LpParameters(phi_deg=40)  # above psi = atan(2w)
    with pytest.raises(ValueError):
        build_interior_lp(precision_bits=16)


def test_sqrt2_coefficient_rounded_up():
    lp = build_interior_lp(precision_bits=64)
    xy = lp.constraints[0]
    z = dict(xy.coefs)[VARIABLES.index("ZC0")]
    # exact comparison against sqrt 2: z >= sqrt2 iff z^2 >= 2, and z - 2^-64 < sqrt2
    assert z * z >= 2
    assert (z - Fraction(1, 2 ** 64)) ** 2 < 2
    assert z.denominator <= 2 ** 64


def test_height_rhs_rounded_down():
    lp = build_interior_lp(precision_bits=64)
    c = next(c for c in lp.constraints if c.name == "cb+i[1]")
    w = Fraction("0.1793")
    # h = 1 / sqrt(4 + w^-2): rhs <= h iff rhs^2 (4 + w^-2) <= 1
    assert c.rhs ** 2 * (4 + 1 / w ** 2) <= 1
    assert (c.rhs + Fraction(1, 2 ** 64)) ** 2 * (4 + 1 / w ** 2) > 1


def test_round_helpers():
    with mpmath.workprec(200):
        x = mpmath.iv.sqrt(3)
        up, down = round_up(x, 40), round_down(x, 40)
    assert down * down < 3 < up * up
    assert up - down == Fraction(1, 2 ** 40)
    assert round_up(Fraction(1, 3), 4) == Fraction(6, 16)
    assert round_down(Fraction(1, 3), 4) == Fraction(5, 16)
    assert round_up(Fraction(1, 4), 4) == round_down(Fraction(1, 4), 4) == Fraction(1, 4)


def test_paper_optimum(paper_lp_solution):
    lp, sol = paper_lp_solution
    assert Fraction(2) + Fraction(1, 10 ** 5) < sol.optimum
    assert abs(sol.optimum - Fraction("2.0000113")) < Fraction(5, 10 ** 7)
    assert sol.optimum == sum(sol.primal)
    assert all(x >= 0 for x in sol.primal)
    assert all(c.lhs(sol.primal) >= c.rhs for c in lp.constraints)


def test_certificate_round_trip(paper_lp_solution):
    lp, sol = paper_lp_solution
    assert check_dual_certificate(lp, sol.dual) == sol.optimum
    again = DualCertificate.from_json(sol.dual.to_json(lp), lp)
    assert again == sol.dual


def test_certificate_rejections(paper_lp_solution):
    lp, sol = paper_lp_solution
    ys = list(sol.dual.multipliers)
    i = next(k for k, y in enumerate(ys) if y > 0)
    ys[i] = -ys[i]
    with pytest.raises(CertificateError) as err:
        check_dual_certificate(lp, DualCertificate(tuple(ys), Fraction(0)))
    assert err.value.index == i
    # scaling a tight certificate up breaks a dual constraint
    big = tuple(2 * y for y in sol.dual.multipliers)
    with pytest.raises(CertificateError):
        check_dual_certificate(lp, DualCertificate(big, Fraction(0)))
    zero = DualCertificate((Fraction(0),) * 32, Fraction(0))
    assert check_dual_certificate(lp, zero) == 0


def _two_variable_optimum(lp):
    """Exact minimum of u + z over the two aggregate constraints, by vertex
    enumeration (every region shares one coefficient per class)."""
    rows = []
    for c in lp.constraints:
        d = dict(c.coefs)
        a = d[VARIABLES.index("XC0")]
        assert d[VARIABLES.index("YC0")] == a
        rows.append((a, d[VARIABLES.index("ZC0")], c.rhs))
    lines = rows + [(Fraction(1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(1), Fraction(0))]
    best = None
    for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(lines, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        u, z = (c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det
        if u >= 0 and z >= 0 and all(a * u + b * z >= r for a, b, r in rows):
            best = u + z if best is None else min(best, u + z)
    return best


def test_aggregate_relaxation(paper_lp_solution):
    lp, sol = paper_lp_solution
    small = lp.restricted(["xy", "zz"])
    assert small.shape == (2, 39)
    got = solve_exact(small).optimum
    assert got == _two_variable_optimum(small)
    assert Fraction(199, 100) <= got <= sol.optimum


def test_vanishing_phi_gives_two():
    lp = build_interior_lp(LpParameters(phi_deg=Fraction(1, 10 ** 9)))
    assert abs(float(solve_exact(lp).optimum) - 2) < 1e-6


def test_float_oracle_agrees(paper_lp_solution):
    scipy_opt = pytest.importorskip("scipy.optimize")
    lp, sol = paper_lp_solution
    A = np.array([[float(v) for v in row] for row in lp.dense()])
    b = np.array([float(v) for v in lp.rhs])
    res = scipy_opt.linprog(np.ones(39), A_ub=-A, b_ub=-b, bounds=(0, None), method="highs")
    assert res.status == 0
    assert res.fun == pytest.approx(float(sol.optimum), abs=1e-9)


def test_published_table_is_near_feasible():
    lp = build_interior_lp()
    res = evaluate_constraints(lp, PUBLISHED)
    assert min(r.slack for r in res) > -1e-7
    assert math.fsum(float(v) for v in PUBLISHED.values()) == pytest.approx(2.0000113, abs=5e-7)


def test_regression_reference_values(paper_lp_solution):
    assert PUBLISHED["XA1"] == Fraction("0.2762651")
    assert PUBLISHED["ZC0"] == Fraction("0.0307674")
    assert all(PUBLISHED[v] == 0 for v in VARIABLES if v.startswith("Z") and v != "ZC0")
    reg = primal_regression([PUBLISHED[v] for v in VARIABLES])
    assert reg.max_deviation == 0
    _, sol = paper_lp_solution
    reg = primal_regression(sol.primal)
    assert set(reg.deviations) == set(VARIABLES)
    assert reg.deviations[reg.worst] == reg.max_deviation


def test_lp_export(paper_lp_solution):
    lp, _ = paper_lp_solution
    text = to_lp_format(lp)
    assert text.startswith("\\") and text.rstrip().endswith("End")
    assert text.count(">=") == 32 + 39
    # the first constraint's sqrt2 coefficient is written exactly
    z = dict(lp.constraints[0].coefs)[VARIABLES.index("ZC0")]
    line = next(l for l in text.splitlines() if l.startswith(" xy:"))
    token = line.split(" ZC0")[0].split()[-1]
    assert Fraction(token) == z


@pytest.mark.slow
def test_precision_monotone(paper_lp_solution):
    _, sol64 = paper_lp_solution
    opt32 = solve_exact(build_interior_lp(precision_bits=32)).optimum
    opt128 = solve_exact(build_interior_lp(precision_bits=128)).optimum
    assert opt32 <= sol64.optimum <= opt128
    assert opt32 > Fraction(2) + Fraction(1, 10 ** 5)

"""``opaque`` command line.

Exit codes: 0 opaque / success, 1 witness found (the barrier is not opaque),
2 inconclusive, 64 usage error, 65 unreadable barrier file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .advance import AdvanceConfig, advance_budget, run_advance
from .audit import (
    DecompositionError,
    RegionsThm1,
    apply_symmetry,
    barrier_stats,
    build_partition,
    decompose,
    evaluate_thm1_lemmas,
    wlog_symmetry,
)
from .barrier_io import BarrierParseError, parse_barrier_file, serialize_barrier
from .constructions import BarrierKind, known_barrier
from .geometry import Barrier, ConvexPolygon, GeometryError, Line, Point, Segment
from .line_measure import (
    OverlapError,
    cone_angle_bound,
    line_measure_single,
    mc_meeting_measure,
    meeting_measure,
)
from .lp_bound import (
    PUBLISHED,
    LpParameters,
    build_interior_lp,
    check_dual_certificate,
    evaluate_constraints,
    symmetric_residuals,
    primal_regression,
    solve_exact,
    to_lp_format,
)
from .opacity import DEFAULT_CLEARANCE, DEFAULT_STEP, main_direction_slack, search_witness
from .svg import render_svg

EXIT_OK, EXIT_WITNESS, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# output


def _plain(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _flatten(prefix: str, v, out: list):
    if isinstance(v, dict):
        for k, x in v.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), x, out)
    elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
        for i, x in enumerate(v):
            _flatten(f"{prefix}[{i}]", x, out)
    else:
        out.append((prefix, v))


def emit(report: dict, fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    report = _plain(report)
    if fmt == "json":
        stream.write(json.dumps(report, indent=2) + "\n")
        return
    rows: list = []
    _flatten("", report, rows)
    for k, v in rows:
        stream.write(f"{k}\t{json.dumps(v) if isinstance(v, (list, dict)) else v}\n")


def _read_barrier(path: str) -> Barrier:
    if path == "-":
        data = sys.stdin.buffer.read()
    else:
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_barrier_file(data)


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


# ---------------------------------------------------------------------------
# commands


def _scan(args, barrier):
    return search_witness(barrier, angular_step=args.angular_step, min_clearance=args.clearance)


def _status_code(status: str) -> int:
    return {"opaque": EXIT_OK, "witness": EXIT_WITNESS}.get(status, EXIT_INCONCLUSIVE)


def cmd_verify(args) -> int:
    b = _read_barrier(args.barrier)
    res = _scan(args, b)
    report = {
        "name": b.name,
        "segments": len(b),
        "length": b.length,
        "status": res.status,
        "angles_scanned": res.angles_scanned,
        "widest_gap": res.widest_gap,
        "direction_slack": main_direction_slack(b)._asdict(),
        "witness": res.witness.to_dict() if res.witness else None,
    }
    emit(report, args.format)
    if args.figure:
        from .plotting import barrier_figure
        barrier_figure(b, args.figure, witness=res.witness.line if res.witness else None,
                       title=f"{b.name or 'barrier'}: {res.status}")
    return _status_code(res.status)


def cmd_witness(args) -> int:
    b = _read_barrier(args.barrier)
    res = _scan(args, b)
    emit(res.witness.to_dict() if res.witness else {"witness": None, "status": res.status}, args.format)
    return _status_code(res.status)


def cmd_advance(args) -> int:
    b = _read_barrier(args.barrier)
    phi = math.radians(args.phi_deg) if args.phi_deg is not None else math.asin(1e-4)
    cfg = AdvanceConfig(phi=phi, w1=args.w1, w2=args.w2, bounding_square=args.mode,
                        min_clearance=args.clearance, max_events=args.max_events)
    res = run_advance(b, cfg)
    if args.trace:
        lines = "".join(json.dumps({"event": i, **e.to_dict()}) + "\n"
                        for i, e in enumerate(res.state.event_log))
        if args.trace == "-":
            sys.stderr.write(lines)
        else:
            _write(args.trace, lines)
    low, high = res.state.advance_totals()
    report = {
        "status": res.status,
        "events": len(res.state.event_log),
        "anchor_low": list(res.state.anchor_low.xy),
        "anchor_high": list(res.state.anchor_high.xy),
        "advance_low": low,
        "advance_high": high,
        "resweeps": {str(k): v for k, v in sorted(res.state.resweeps.items())},
        "witness": res.witness.to_dict() if res.witness else None,
    }
    try:
        stats = barrier_stats(b, RegionsThm1(phi=phi, w1=args.w1, w2=args.w2))
        report["budget"] = advance_budget(stats, args.w1, phi).to_dict()
    except ValueError as exc:
        report["budget"] = {"error": str(exc)}
    emit(report, args.format)
    if args.figure:
        from .plotting import barrier_figure
        barrier_figure(b, args.figure, witness=res.witness.line if res.witness else None,
                       title=f"advance: {res.status}")
    return {"success": EXIT_WITNESS, "exhausted": EXIT_INCONCLUSIVE}.get(res.status, EXIT_INCONCLUSIVE)


def _parse_body(text: str):
    try:
        pts = [tuple(float(c) for c in p.split(",")) for p in text.replace(";", " ").split()]
        if any(len(p) != 2 for p in pts):
            raise ValueError
    except ValueError:
        raise UsageError(f"cannot read body {text!r}; use 'x,y x,y ...'") from None
    if len(pts) == 2:
        return Segment(Point(*pts[0]), Point(*pts[1]))
    return ConvexPolygon(pts)


def cmd_measure(args) -> int:
    bodies = [_parse_body(t) for t in args.body]
    if not 1 <= len(bodies) <= 2:
        raise UsageError("give one or two --body options")
    report: dict = {"single": [line_measure_single(b) for b in bodies]}
    if len(bodies) == 2:
        mm = meeting_measure(*bodies)
        report.update({"l_ext": mm.covers.l_ext, "l_int": mm.covers.l_int, "meeting_measure": mm.measure})
        if isinstance(bodies[0], Segment):
            cb = cone_angle_bound(bodies[0], bodies[1])
            report["cone_bound"] = {"theta_max": cb.theta_max, "bound": cb.bound, "apex": list(cb.apex)}
    if args.mc_samples:
        est = mc_meeting_measure(bodies[0], bodies[1] if len(bodies) == 2 else None,
                                 samples=args.mc_samples, seed=args.seed)
        report["monte_carlo"] = {"estimate": est.estimate, "standard_error": est.standard_error,
                                 "samples": est.samples}
    emit(report, args.format)
    return EXIT_OK


def cmd_lp_bound(args) -> int:
    params = LpParameters(w=args.w if args.w is not None else Fraction("0.1793"),
                          phi_deg=args.phi_deg if args.phi_deg is not None else Fraction("1.5589"))
    lp = build_interior_lp(params, args.precision_bits)
    sol = solve_exact(lp)
    bound = check_dual_certificate(lp, sol.dual)
    reg = primal_regression(sol.primal)
    threshold = Fraction(2) + Fraction(1, 10 ** 5)
    if args.export_lp:
        _write(args.export_lp, to_lp_format(lp))
    if args.certificate:
        _write(args.certificate, sol.dual.to_json(lp) + "\n")
    if args.format == "text":
        verdict = ">" if bound > threshold else "<="
        sys.stdout.write(f"optimum {float(sol.optimum):.10f} {verdict} 2.00001, certificate OK\n")
        sys.stdout.write(f"certified_bound\t{bound.numerator}/{bound.denominator}\n")
        sys.stdout.write(f"constraints\t{lp.shape[0]}\nvariables\t{lp.shape[1]}\npivots\t{sol.pivots}\n")
        sys.stdout.write(f"max_table_deviation\t{reg.max_deviation:.3e}\t{reg.worst}\n")
    else:
        emit({
            "optimum": float(sol.optimum),
            "optimum_exact": f"{sol.optimum.numerator}/{sol.optimum.denominator}",
            "certificate_ok": True,
            "certified_bound": float(bound),
            "exceeds_2_plus_1e-5": bound > threshold,
            "constraints": lp.shape[0],
            "variables": lp.shape[1],
            "precision_bits": args.precision_bits,
            "pivots": sol.pivots,
            "primal": {k: float(v) for k, v in sol.primal_dict().items()},
            "table_max_deviation": reg.max_deviation,
            "table_worst_variable": reg.worst,
        }, "json")
    if args.figure:
        from .plotting import lp_solution_figure
        lp_solution_figure(sol.primal_dict(), PUBLISHED, args.figure)
    return EXIT_OK


def cmd_construct(args) -> int:
    try:
        kind = BarrierKind.parse(args.kind)
    except ValueError:
        raise UsageError(f"unknown kind {args.kind!r}; choose from "
                         + ", ".join(k.value.replace("_", "-") for k in BarrierKind)) from None
    nb = known_barrier(kind)
    _write(args.out, serialize_barrier(nb.barrier, closed_form_length=nb.closed_form_length))
    return EXIT_OK


def cmd_audit(args) -> int:
    b = _read_barrier(args.barrier)
    w = float(args.w) if args.w is not None else 0.1793
    phi_deg = float(args.phi_deg) if args.phi_deg is not None else 1.5589
    phi = math.radians(phi_deg)
    part = build_partition(w)
    vec = decompose(b, part, phi, strict=not args.lenient)
    g = wlog_symmetry(vec)
    normalised = decompose(apply_symmetry(b, g), part, phi, strict=False)
    lp = build_interior_lp(LpParameters(w=Fraction(str(w)), phi_deg=Fraction(str(phi_deg))), 64)
    res = evaluate_constraints(lp, normalised.values)
    report = {
        "name": b.name,
        "length": b.length,
        "lemmas": evaluate_thm1_lemmas(b).to_dict(),
        "decomposition": vec.to_dict(),
        "wlog_symmetry": g,
        "lp_constraints": {r.name: r.slack for r in res},
        "lp_symmetric_satisfied": all(r.slack >= -1e-9 for r in symmetric_residuals(lp, vec.values)),
        "lp_all_satisfied_after_wlog": all(r.slack >= -1e-9 for r in res),
    }
    emit(report, args.format)
    if args.figure:
        from .plotting import decomposition_figure
        decomposition_figure(vec.values, args.figure)
    return EXIT_OK


def cmd_render(args) -> int:
    b = _read_barrier(args.barrier)
    witness = None
    if args.witness:
        res = _scan(args, b)
        witness = res.witness.line if res.witness else None
    elif args.line is not None:
        witness = Line(*args.line)
    cuts = build_partition(args.partition).cuts if args.partition else ()
    _write(args.out, render_svg(b, witness=witness, cuts=cuts))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="opaque", description="Opaque barriers for the unit square.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=("json", "text"), default="json")
    scan = _Parser(add_help=False)
    scan.add_argument("--angular-step", type=_positive, default=DEFAULT_STEP)
    scan.add_argument("--clearance", type=_positive, default=DEFAULT_CLEARANCE)
    fig = _Parser(add_help=False)
    fig.add_argument("--figure", metavar="PATH", help="also write a matplotlib figure")

    s = sub.add_parser("verify", parents=[fmt, scan, fig], help="opaqueness report")
    s.add_argument("barrier", help="barrier JSON file or - for stdin")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("witness", parents=[fmt, scan], help="print a witness line if one exists")
    s.add_argument("barrier")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("advance", parents=[fmt, fig], help="run the sweep")
    s.add_argument("barrier")
    s.add_argument("--mode", choices=("U3", "U"), default="U3")
    s.add_argument("--w1", type=float, default=1 / 20)
    s.add_argument("--w2", type=float, default=1 / 1000)
    s.add_argument("--phi-deg", type=float, default=None)
    s.add_argument("--clearance", type=_positive, default=DEFAULT_CLEARANCE)
    s.add_argument("--max-events", type=int, default=10_000)
    s.add_argument("--trace", metavar="PATH", help="event log as JSON lines (- for stderr)")
    s.set_defaults(func=cmd_advance)

    s = sub.add_parser("measure", parents=[fmt], help="line measures of one or two bodies")
    s.add_argument("--body", action="append", default=[], required=True,
                   help="'x,y x,y ...' (two points give a segment)")
    s.add_argument("--mc-samples", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("lp-bound", parents=[fmt, fig], help="exact LP lower bound")
    s.add_argument("--w", type=_frac, default=None)
    s.add_argument("--phi-deg", type=_frac, default=None)
    s.add_argument("--precision-bits", type=int, default=64)
    s.add_argument("--export-lp", metavar="PATH")
    s.add_argument("--certificate", metavar="PATH")
    s.set_defaults(func=cmd_lp_bound)

    s = sub.add_parser("construct", help="print a known barrier")
    s.add_argument("kind")
    s.add_argument("--out", metavar="PATH")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("audit", parents=[fmt, fig], help="lemma report and decomposition")
    s.add_argument("barrier")
    s.add_argument("--w", type=_frac, default=None)
    s.add_argument("--phi-deg", type=_frac, default=None)
    s.add_argument("--lenient", action="store_true", help="allow length outside the unit square")
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("render", parents=[scan], help="SVG picture")
    s.add_argument("barrier")
    s.add_argument("--witness", action="store_true", help="search for and draw a witness line")
    s.add_argument("--line", type=float, nargs=2, metavar=("THETA", "P"), help="draw this line instead")
    s.add_argument("--partition", type=float, metavar="W", help="overlay the 13-region cuts")
    s.add_argument("--out", metavar="PATH")
    s.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except BarrierParseError as exc:
        sys.stderr.write(f"opaque: parse error: {exc}\n")
        return EXIT_PARSE
    except (UsageError, OverlapError, DecompositionError, GeometryError, ValueError) as exc:
        sys.stderr.write(f"opaque: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())

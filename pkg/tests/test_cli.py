import io
import json
import math
import re
import subprocess
import sys
from fractions import Fraction

import pytest

from opaque.barrier_io import BarrierParseError, parse_barrier_file, serialize_barrier
from opaque.cli import main
from opaque.constructions import BarrierKind, known_barrier
from opaque.geometry import Barrier, Line, unit_square
from opaque.opacity import verify_witness


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(stdin.encode())))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def barrier_file(tmp_path):
    def make(kind):
        path = tmp_path / f"{kind}.json"
        path.write_text(serialize_barrier(known_barrier(kind).barrier))
        return str(path)
    return make


def test_construct_pipe_verify(capsys, monkeypatch):
    code, text, _ = run(["construct", "conjectured-optimal"], capsys)
    assert code == 0
    code, out, _ = run(["verify", "-"], capsys, stdin=text, monkeypatch=monkeypatch)
    assert code == 0
    rep = json.loads(out)
    assert rep["status"] == "opaque"
    assert rep["length"] == pytest.approx(math.sqrt(2) + math.sqrt(6) / 2, abs=1e-12)


def test_imperfect_witness_exit_one(capsys, monkeypatch):
    _, text, _ = run(["construct", "imperfect-four-direction"], capsys)
    code, out, _ = run(["witness", "-"], capsys, stdin=text, monkeypatch=monkeypatch)
    assert code == 1
    w = json.loads(out)
    line = Line(w["theta"], w["p"])
    assert verify_witness(line, known_barrier("imperfect_four_direction").barrier, unit_square(), 1e-6)


def test_inconclusive_exit_two(capsys, barrier_file):
    # a coarse scan of three sides finds no line, but the gap at corner level is below resolution
    code, out, _ = run(["verify", barrier_file("three_sides"), "--clearance", "0.3"], capsys)
    rep = json.loads(out)
    assert (code, rep["status"]) in ((0, "opaque"), (2, "inconclusive"))


def test_text_format_is_tab_delimited(capsys, barrier_file):
    code, out, _ = run(["verify", barrier_file("two_diagonals"), "--format", "text"], capsys)
    assert code == 0
    rows = dict(line.split("\t", 1) for line in out.strip().splitlines())
    assert rows["status"] == "opaque"
    assert float(rows["length"]) == pytest.approx(2 * math.sqrt(2))


def test_usage_errors(capsys, barrier_file):
    assert run(["no-such-command"], capsys)[0] == 64
    assert run(["--version"], capsys)[0] == 0
    assert run(["verify"], capsys)[0] == 64
    assert run(["verify", "/no/such/file.json"], capsys)[0] == 64
    assert run(["construct", "hexagon"], capsys)[0] == 64
    assert run(["verify", barrier_file("two_diagonals"), "--clearance", "-1"], capsys)[0] == 64


@pytest.mark.parametrize("payload", [
    "{not json",
    '{"segments": [[[0,0],[0,0]]]}',
    '{"segments": [[[0,0],[1]]]}',
    '{"segments": "none"}',
    '{"segments": [[["1/0", 0], [1, 1]]]}',
])
def test_parse_errors_exit_65(payload, capsys, monkeypatch):
    code, _, err = run(["verify", "-"], capsys, stdin=payload, monkeypatch=monkeypatch)
    assert code == 65
    assert "parse error" in err


def test_parse_examples():
    b = parse_barrier_file(b'{"segments": [[[0,0],[1,1]]]}')
    assert len(b) == 1 and b.length == pytest.approx(math.sqrt(2))
    b = parse_barrier_file('{"segments": [[["1/2","1/2"],[1,1]]]}')
    assert next(iter(b)).a.x == Fraction(1, 2)
    with pytest.raises(BarrierParseError, match="segment 0"):
        parse_barrier_file('{"segments":\n  [[[0,0],[0,0]]]}')
    with pytest.raises(BarrierParseError) as err:
        parse_barrier_file('{"segments":\n  [[[0,0],[1,1]],]}')
    assert (err.value.line, err.value.column) == (2, 18)


def test_round_trip_exact():
    segs = [((Fraction(1, 3), Fraction(2, 7)), (Fraction(5, 6), Fraction(1))),
            ((Fraction(0), Fraction(1, 2)), (Fraction(3, 4), Fraction(-1, 9)))]
    b = Barrier.from_coords(segs, name="exact")
    again = parse_barrier_file(serialize_barrier(b))
    assert again.name == "exact"
    assert [(s.a.xy, s.b.xy) for s in again] == [(s.a.xy, s.b.xy) for s in b]


@pytest.mark.parametrize("kind", list(BarrierKind))
def test_round_trip_known(kind):
    b = known_barrier(kind).barrier
    again = parse_barrier_file(serialize_barrier(b))
    assert [(s.a.xy, s.b.xy) for s in again] == [(s.a.xy, s.b.xy) for s in b]


def test_render_counts_and_determinism(capsys, barrier_file, tmp_path):
    path = barrier_file("two_diagonals")
    _, svg1, _ = run(["render", path], capsys)
    _, svg2, _ = run(["render", path], capsys)
    assert svg1 == svg2
    assert svg1.count('class="segment"') == 2 and svg1.count('class="square"') == 1
    _, svg, _ = run(["render", barrier_file("conjectured_optimal"), "--partition", "0.1793"], capsys)
    assert svg.count('class="segment"') == 4 and svg.count('class="cut"') == 8
    _, svg, _ = run(["render", barrier_file("imperfect_four_direction"), "--witness"], capsys)
    assert svg.count('class="witness"') == 1
    assert re.search(r"\.witness\{[^}]*stroke-dasharray", svg)
    out = tmp_path / "x.svg"
    assert run(["render", path, "--line", "0.3", "0.2", "--out", str(out)], capsys)[0] == 0
    assert out.read_text().count('class="witness"') == 1


def test_advance_with_trace(capsys, barrier_file, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, out, _ = run(["advance", barrier_file("imperfect_four_direction"), "--trace", str(trace)], capsys)
    assert code == 1
    rep = json.loads(out)
    assert rep["status"] == "success" and rep["witness"] is not None
    recs = [json.loads(l) for l in trace.read_text().splitlines()]
    assert len(recs) == rep["events"]
    assert [r["event"] for r in recs] == list(range(len(recs)))
    assert math.fsum(r["high_dx"] for r in recs) == pytest.approx(rep["advance_high"])
    code, out, err = run(["advance", barrier_file("two_diagonals"), "--mode", "U", "--trace", "-"], capsys)
    assert code == 2 and json.loads(out)["status"] == "exhausted"
    assert all(json.loads(l)["kind"] for l in err.splitlines())


def test_measure(capsys):
    code, out, _ = run(["measure", "--body", "0,0 1,0 1,1 0,1"], capsys)
    assert code == 0 and json.loads(out)["single"] == [pytest.approx(4.0)]
    code, out, _ = run(["measure", "--body", "0,0 1,0", "--body", "0,1 1,1",
                        "--mc-samples", "20000", "--seed", "3"], capsys)
    rep = json.loads(out)
    # two parallel unit segments at distance 1: 2 (sqrt 2 - 1) by the crossed-strings formula
    assert rep["meeting_measure"] == pytest.approx(2 * (math.sqrt(2) - 1), abs=1e-12)
    assert abs(rep["monte_carlo"]["estimate"] - rep["meeting_measure"]) < 4 * rep["monte_carlo"]["standard_error"]
    assert run(["measure", "--body", "0,0 1"], capsys)[0] == 64


def test_audit_report(capsys, barrier_file):
    code, out, _ = run(["audit", barrier_file("steiner_corners")], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["lp_symmetric_satisfied"] and rep["lp_all_satisfied_after_wlog"]
    assert sum(rep["decomposition"]["values"].values()) == pytest.approx(rep["length"], abs=1e-12)


def test_figures(capsys, barrier_file, tmp_path):
    for argv in (["verify", barrier_file("two_diagonals")],
                 ["advance", barrier_file("imperfect_four_direction")],
                 ["audit", barrier_file("conjectured_optimal")]):
        png = tmp_path / (argv[0] + ".png")
        run(argv + ["--figure", str(png)], capsys)
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_lp_bound_text(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    lpfile = tmp_path / "model.lp"
    code, out, _ = run(["lp-bound", "--w", "0.1793", "--phi-deg", "1.5589", "--format", "text",
                        "--certificate", str(cert), "--export-lp", str(lpfile)], capsys)
    assert code == 0
    assert out.splitlines()[0].endswith("> 2.00001, certificate OK")
    data = json.loads(cert.read_text())
    assert len(data["multipliers"]) == 32
    assert Fraction(data["certified_bound"]) > Fraction(200001, 100000)
    assert "Subject To" in lpfile.read_text()


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "opaque.cli", "construct", "two-diagonals"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert len(json.loads(res.stdout)["segments"]) == 2

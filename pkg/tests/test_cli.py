import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folia.cli import UsageError, main, run_analysis
from folia.foliation import Derivation
from folia.invariant import EvalPoint
from folia.parse import (
    FoliationFile,
    ParseError,
    format_foliation_file,
    parse_foliation_file,
    parse_polynomial,
)
from folia.polyring import VariableContext
from folia.report import Analysis, Report, emit_report, to_json, to_text

from conftest import poly_strategy

SIX = """\
# C^4 sample
vars: u v x y
params: t1 t2
field D : u*x d/dx + v*y d/dy
point P1 : (1, 2, 1, 1)
point P0 : (3, 5, 0, 0)
point G  : (t1, t2, 1, 1)
"""

PQ = """\
vars: x y
field D : 2*x d/dx + 3*y d/dy
point O : (0, 0)
point A : (1, 1)
candidate one : 1
candidate c : x^2 - y
"""


@pytest.fixture
def six_file(tmp_path):
    path = tmp_path / "six.fol"
    path.write_text(SIX)
    return path


@pytest.fixture
def pq_file(tmp_path):
    path = tmp_path / "pq.fol"
    path.write_text(PQ)
    return path


# ---- parsing ----------------------------------------------------------------


def test_parse_sample():
    ff = parse_foliation_file(SIX)
    assert ff.ctx.nvars == 4 and len(ff.fields) == 1 and len(ff.points) == 3
    assert ff.ctx.params == ("t1", "t2")
    assert ff.points["G"].tag == "generic" and ff.points["P1"].tag == "closed"
    assert str(ff.fields["D"]) == "u*x d/dx + v*y d/dy"


def test_undeclared_identifier_position():
    with pytest.raises(ParseError) as err:
        parse_foliation_file("vars: x y\nfield D: x d/dz\n")
    assert err.value.line == 2 and err.value.column == 15
    assert "z" in err.value.message
    with pytest.raises(ParseError) as err:
        parse_foliation_file("vars: x y\ncandidate c : x + w\n")
    assert (err.value.line, err.value.column) == (2, 19)


def test_empty_input():
    with pytest.raises(ParseError, match="no vars declaration"):
        parse_foliation_file("")
    with pytest.raises(ParseError, match="no vars declaration"):
        parse_foliation_file("# only a comment\n\n")


@pytest.mark.parametrize("text,fragment", [
    ("vars: x y\npoint P : (1, 2, 3)\n", "coordinates"),
    ("vars: x y\ncandidate x : 1\n", "duplicate"),
    ("vars: x y\ncandidate c : 1\ncandidate c : 2\n", "duplicate"),
    ("vars: x y\nparams: x\n", "duplicate"),
    ("vars: x y\ncandidate c : x^y\n", "integer"),
    ("vars: x y\ncandidate c : x / y\n", "divi"),
    ("vars: x y\ncandidate c : 1/0\n", "zero"),
    ("vars: x y\ncandidate c : (x + 1\n", ")"),
    ("vars: x y\nbogus\n", "unrecognized"),
    ("vars: x y\noptions: speed=3\n", "unknown option"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as err:
        parse_foliation_file(text)
    assert fragment in str(err.value)
    assert err.value.line >= 1 and err.value.column >= 1


def test_field_terms_and_options():
    ff = parse_foliation_file("vars: x y\nfield D : -x d/dx + (x - 1/2)*y d/dy - y d/dx\n"
                              "options: max_degree=3 word_cap=5\n")
    ctx = ff.ctx
    d = ff.fields["D"]
    assert d.components[0] == parse_polynomial("-x - y", ctx)
    assert d.components[1] == parse_polynomial("x*y - 1/2*y", ctx)
    assert ff.options == {"max_degree": 3, "word_cap": 5}


def test_parameter_division_allowed():
    ff = parse_foliation_file("vars: x\nparams: t\npoint P : (1/(t + 1))\ncandidate c : x/t\n")
    t = ff.ctx.param("t")
    assert ff.points["P"].coords == (1 / (t + 1),)
    assert ff.candidates["c"].coefficient((1,)) == 1 / t


def test_round_trip_sample():
    for text in (SIX, PQ):
        ff = parse_foliation_file(text)
        assert parse_foliation_file(format_foliation_file(ff)) == ff


CTX = VariableContext(["x", "y", "z"], ["t"])
POLY = poly_strategy(VariableContext(["x", "y", "z"]), degree=3, max_terms=4)
SCALAR = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def foliation_files(draw):
    ff = FoliationFile(CTX)
    names = iter(f"N{i}" for i in range(100))
    t = CTX.param("t")
    for _ in range(draw(st.integers(1, 3))):
        comps = [draw(POLY).to_context(CTX) for _ in range(3)]
        ff.fields[next(names)] = Derivation(tuple(comps))
    for _ in range(draw(st.integers(0, 3))):
        coords = [draw(SCALAR) for _ in range(3)]
        if draw(st.booleans()):
            coords[0] = t * CTX.scalar(draw(SCALAR)) + 1
        name = next(names)
        ff.points[name] = EvalPoint.of(CTX, coords, name)
    for _ in range(draw(st.integers(0, 3))):
        p = draw(POLY).to_context(CTX)
        if draw(st.booleans()):
            p = p.scale(t + 2)
        ff.candidates[next(names)] = p
    if draw(st.booleans()):
        ff.options = {"max_degree": draw(st.integers(1, 5))}
    return ff


@settings(max_examples=100, deadline=None)
@given(foliation_files())
def test_round_trip_random(ff):
    back = parse_foliation_file(format_foliation_file(ff))
    assert back == ff


# ---- analyses ---------------------------------------------------------------


def test_profile_example():
    ff = parse_foliation_file(SIX)
    rep = run_analysis(ff, "profile")
    rows = rep.analyses[0].result["rows"]
    assert [r["dimension"] for r in rows] == ["1", "0", "2"]
    assert all(r["stabilized"] for r in rows)
    assert rep.errors == 0


def test_first_integral_example():
    ff = parse_foliation_file(PQ)
    res = run_analysis(ff, "first-integral").analyses[0].result
    assert [r["first_integral"] for r in res["rows"]] == ["x^3/y^2"]
    assert res["rows"][0]["verified"] is True


def test_contact_order_examples():
    ff = parse_foliation_file(PQ)
    rows = run_analysis(ff, "contact-order", candidate="one").analyses[0].result["rows"]
    assert [r["order"] for r in rows] == ["0", "0"]
    rows = run_analysis(ff, "contact-order", candidate="c").analyses[0].result["rows"]
    assert [(r["point"], r["kind"], r["order"]) for r in rows] == [
        ("O", "infinite", "inf"), ("A", "finite", "1")]
    assert rows[1]["word"] == ["D"]


def test_extactic_and_invariant_commands():
    ff = parse_foliation_file(PQ)
    ext = run_analysis(ff, "extactic", degree=1).analyses[0].result["rows"][0]
    assert ext["polynomial"] == "6*x*y" and ext["vanishes"] is False
    inv = run_analysis(ff, "invariant", points=["A"], max_degree=3).analyses[0].result["rows"][0]
    assert inv["generators"] == ["x^3 - y^2"]
    assert inv["dimension"] == "1"


@pytest.mark.parametrize("kwargs", [
    {"command": "explode"},
    {"command": "profile", "points": ["nowhere"]},
    {"command": "contact-order", "candidate": "nope"},
    {"command": "profile", "max_degree": 0},
    {"command": "contact-order", "word_cap": -1},
])
def test_usage_errors(kwargs):
    ff = parse_foliation_file(PQ)
    with pytest.raises(UsageError):
        run_analysis(ff, **kwargs)


def test_no_floats_in_reports():
    ff = parse_foliation_file(PQ)
    for cmd in ("contact-order", "invariant", "extactic", "first-integral"):
        blob = json.loads(to_json(run_analysis(ff, cmd)))

        def walk(v):
            assert not isinstance(v, float)
            if isinstance(v, dict):
                for w in v.values():
                    walk(w)
            elif isinstance(v, list):
                for w in v:
                    walk(w)

        walk(blob)


# ---- reports ----------------------------------------------------------------


def test_empty_report_json(capsys):
    emit_report(Report(), "json")
    assert capsys.readouterr().out == '{"version":"1","analyses":[],"warnings":[]}\n'


def test_one_warning(tmp_path):
    rep = Report(warnings=["caps reached"])
    out = tmp_path / "r.json"
    emit_report(rep, "json", out)
    assert json.loads(out.read_text())["warnings"] == ["caps reached"]


def test_emission_is_byte_identical(tmp_path):
    ff = parse_foliation_file(PQ)
    rep = run_analysis(ff, "first-integral")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    emit_report(rep, "json", a)
    emit_report(rep, "json", b)
    assert a.read_bytes() == b.read_bytes()
    again = tmp_path / "c.json"
    emit_report(run_analysis(parse_foliation_file(PQ), "first-integral"), "json", again)
    assert again.read_bytes() == a.read_bytes()


def test_text_report_is_aligned():
    rep = Report([Analysis("demo", {"k": "v"}, {"rows": [{"a": "1", "bb": "long"}, {"a": "333", "bb": "x"}]},
                           ["w"])])
    emit = to_text(rep)
    lines = emit.splitlines()
    assert lines[:3] == ["== demo ==", "k: v", "a    bb"]
    assert lines[4] == "1    long"
    assert "warning: w" in lines


def test_unwritable_destination(tmp_path):
    with pytest.raises(OSError):
        emit_report(Report(), "json", tmp_path / "missing" / "r.json")
    with pytest.raises(ValueError):
        emit_report(Report(), "yaml")


# ---- exit codes -------------------------------------------------------------


def test_main_success(pq_file, tmp_path, capsys):
    out = tmp_path / "fi.json"
    assert main(["first-integral", str(pq_file), "--json", str(out)]) == 0
    assert "x^3/y^2" in capsys.readouterr().out
    data = json.loads(out.read_text())
    assert data["analyses"][0]["micros"] is None


def test_main_json_stdout_and_timing(pq_file, capsys):
    assert main(["extactic", str(pq_file), "--json", "-", "--timing"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert isinstance(data["analyses"][0]["micros"], int)


def test_main_usage_and_analysis_errors(pq_file, tmp_path, capsys):
    assert main(["profile"]) == 2
    assert main(["frobnicate", str(pq_file)]) == 2
    assert main(["profile", str(tmp_path / "absent.fol")]) == 2
    assert main(["contact-order", str(pq_file), "--candidate", "nope"]) == 2
    bad = tmp_path / "bad.fol"
    bad.write_text("vars: x\ncandidate c : x +\n")
    assert main(["contact-order", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_console_script(pq_file):
    proc = subprocess.run([sys.executable, "-m", "folia.cli", "contact-order", str(pq_file),
                           "--candidate", "one", "--json", "-"], capture_output=True, text=True)
    assert proc.returncode == 0
    rows = json.loads(proc.stdout)["analyses"][0]["result"]["rows"]
    assert {r["order"] for r in rows} == {"0"}

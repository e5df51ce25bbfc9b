import json

import pytest
from hypothesis import given, settings, strategies as st

from birank import serialize as ser
from birank.bielliptic import HyperellipticModel
from birank.cli import main, parse_curve, parse_polynomial, run
from birank.elliptic import EllipticCurveQ, is_isomorphic_over_Q


@pytest.mark.parametrize("text,coeffs", [
    ("x3+125", [125, 0, 0, 1]),
    ("x^3 - x", [0, -1, 0, 1]),
    ("x**3 + 3x2 - 2*x + 7", [7, -2, 3, 1]),
    (" x6 + 2 ", [2, 0, 0, 0, 0, 0, 1]),
    ("-x+x3", [0, -1, 0, 1]),
])
def test_parse_polynomial(text, coeffs):
    assert parse_polynomial(text) == coeffs


@pytest.mark.parametrize("bad", ["", "x3+", "x3++1", "3y", "x3 + 2z"])
def test_parse_polynomial_rejects(bad):
    with pytest.raises(ValueError):
        parse_polynomial(bad)


def test_parse_curve_kinds():
    assert parse_curve("y2=x3+125") == EllipticCurveQ(0, 0, 125)
    assert parse_curve("y^2 = x^3 - 2") == EllipticCurveQ(0, 0, -2)
    E = parse_curve("5*y2=x3-x")
    assert is_isomorphic_over_Q(E, EllipticCurveQ(0, -25, 0))
    C = parse_curve("2y2 = x6 + 3")
    assert isinstance(C, HyperellipticModel) and C.d == 2 and C.degree == 6
    with pytest.raises(ValueError):
        parse_curve("y3=x3+1")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=4, max_size=9))
def test_parse_polynomial_round_trip(coeffs):
    coeffs[-1] = coeffs[-1] or 1
    text = "+".join(f"{c}*x^{i}" for i, c in enumerate(coeffs)).replace("+-", "-")
    assert parse_polynomial(text) == coeffs


@pytest.mark.parametrize("argv,code", [
    ("rank elliptic y2=x3+125", 0),
    ("jacrank g2-partial --d 1 --p 13", 2),
    ("jacrank g2-no2tors --a 8 --m 1", 2),
    ("jacrank g2-full --d 1 --k 2", 2),
    ("rank elliptic y2=x3", 2),
    ("rank elliptic y2=x6+1", 2),
    ("split y2=x3+1", 2),
])
def test_exit_codes(argv, code):
    c, doc = run(argv.split())
    assert c == code and doc["exit_code"] == code
    assert ("error" in doc) == (code != 0)


def test_parameter_violation_names_hypothesis():
    _, doc = run("family g2-full --d 1 --k 2 --p 5".split())
    assert doc["error"]["constraint"] == "p = 3 mod 8"


def test_document_shape_and_round_trip():
    code, doc = run("rank elliptic y2=x3+343 -H 100".split())
    assert code == 0
    text = ser.dumps(doc)
    assert ser.loads(text) == doc
    assert doc["schema_version"] == ser.SCHEMA_VERSION
    cert = doc["results"]["certificate"]
    assert cert["rank"] == {"value": "1", "provenance": "COMPUTED"}
    assert len(cert["independent_points"]) == 1


def test_every_rank_value_is_tagged():
    _, doc = run("jacrank g2-partial --d 1 --p 7".split())

    def walk(node):
        if isinstance(node, dict):
            for k, v in node.items():
                if k in ("rank", "r_lower", "r_upper") and isinstance(v, dict):
                    assert v["provenance"] in ("PAPER", "LITERATURE", "COMPUTED")
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)

    walk(doc)


@pytest.mark.parametrize("argv", ["family g3 --abcd 1,2,3,8 --D-count 2", "points g2-partial --d 1 --p 5",
                                  "table corollary32"])
def test_deterministic(argv):
    _, a = run(argv.split())
    _, b = run(argv.split())
    assert ser.dumps(ser.without_timing(a)) == ser.dumps(ser.without_timing(b))


def test_main_writes_out(tmp_path, capsys):
    out = tmp_path / "doc.json"
    assert main(["rank", "elliptic", "y2=x3+125", "--out", str(out), "--json-pretty"]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["results"]["certificate"]["status"] == "exact"

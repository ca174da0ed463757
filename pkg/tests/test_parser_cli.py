import json
from pathlib import Path

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import X, polys
from polyinv.cli import INVERT_FIELDS, main
from polyinv.corpus import keller_plane
from polyinv.parser import ParseError, format_map, parse_document, parse_map, parse_poly
from polyinv.polymap import PolynomialMap, identity_map

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
GZ_FILE = str(CORPUS / "gorni_zampieri.map")
EX41_FILE = str(CORPUS / "keller_plane.map")


def test_parse_keller_plane():
    assert parse_map("vars: x y\nF1 = x + (y + x^3)^2\nF2 = y + x^3") == keller_plane()


def test_parse_identity():
    assert parse_map("vars: x\nF1 = x") == identity_map(1)


def test_parse_rational_coefficient():
    F = parse_map("vars: x\nF1 = 3/2*x^2")
    assert F[0](2) == 6
    assert F[0].coefficient((2,)) == mpq(3, 2)


def test_parse_unary_minus_and_comments():
    text = "# header\nvars: a b   # names\n\nG = -a^2 - -b\nH = -(a - b)*2\n"
    a, b = X(2)
    assert parse_map(text) == PolynomialMap([-(a**2) + b, 2 * b - 2 * a])


def test_component_order_ignores_lhs_names():
    doc = parse_document("vars: x y\nF2 = y\nF1 = x")
    assert doc.lhs == ["F2", "F1"]
    x, y = X(2)
    assert doc.to_map() == PolynomialMap([y, x])


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("vars: x y\nF1 = x + z\nF2 = y", 2, 10),
        ("vars: x\nF1 = x +\n", 2, 9),
        ("vars: x\nF1 = 2x", 2, 7),
        ("vars: x\nF1 = x^99999", 2, 8),
        ("vars: x\nF1 = 1/0*x", 2, 8),
        ("vars: x x\nF1 = x", 1, 9),
        ("vars: x\nF1 = x $ 1", 2, 8),
        ("F1 = x", 1, 1),
    ],
)
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_map(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_parse_component_count():
    with pytest.raises(ParseError, match="expected 2 components"):
        parse_map("vars: x y\nF1 = x")


def test_parse_poly():
    x, y = X(2)
    assert parse_poly("1 - 4*x*y", ["x", "y"]) == 1 - 4 * x * y


@given(st.integers(1, 3).flatmap(lambda n: st.lists(polys(n), min_size=n, max_size=n)))
@settings(max_examples=60, deadline=None)
def test_round_trip(F):
    assert parse_map(format_map(F)) == PolynomialMap(F)


# command line


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def bad_map(tmp_path):
    p = tmp_path / "bad.map"
    p.write_text("vars: x y\nF1 = x + y^2\nF2 = y + x^2\n", encoding="utf-8")
    return str(p)


def test_cli_invert_keller_plane(capsys):
    code, out, _ = _run(capsys, "invert", EX41_FILE)
    assert code == 0
    assert "G1 = x - y^2" in out
    assert "G2 = y - x^3 + 3*x^2*y^2 - 3*x*y^4 + y^6" in out


def test_cli_invert_not_invertible(capsys, bad_map):
    code, out, _ = _run(capsys, "invert", bad_map)
    assert code == 2
    assert "witness: component" in out


def test_cli_invert_gz_residual_json(capsys):
    code, out, _ = _run(capsys, "invert", GZ_FILE, "--mode", "residual", "--json")
    rec = json.loads(out)
    assert code == 0
    assert rec["m"][:2] == [14, 14]
    assert all(c["residual_verified"] for c in rec["certificate"])
    assert set(INVERT_FIELDS) <= rec.keys()


def test_cli_json_schema_stable(capsys, bad_map, tmp_path):
    singular = tmp_path / "s.map"
    singular.write_text("vars: x y\nF1 = x + y\nF2 = x + y\n", encoding="utf-8")
    for path, expected in ((GZ_FILE, 0), (bad_map, 2), (str(singular), 2)):
        code, out, _ = _run(capsys, "invert", path, "--json")
        assert code == expected
        assert set(INVERT_FIELDS) <= json.loads(out).keys()


def test_cli_budget_exit(capsys):
    code, out, _ = _run(capsys, "invert", GZ_FILE, "--mode", "residual", "--max-terms", "30")
    assert code == 3
    assert "budget" in out


def test_cli_input_errors(capsys, tmp_path):
    code, _, err = _run(capsys, "invert", str(tmp_path / "missing.map"))
    assert code == 1 and "error" in err
    bad = tmp_path / "syntax.map"
    bad.write_text("vars: x\nF1 = x +\n", encoding="utf-8")
    code, _, err = _run(capsys, "invert", str(bad))
    assert code == 1 and "line 2" in err


def test_cli_trace_gz(capsys):
    code, out, _ = _run(capsys, "trace", GZ_FILE, "--component", "3", "--steps", "3")
    assert code == 0
    assert out.splitlines() == ["P_0 = x3", "P_1 = x4^3", "P_2 = 0  (first zero)"]
    code, out, _ = _run(capsys, "trace", GZ_FILE, "--component", "4", "--steps", "2")
    assert out.splitlines()[1] == "P_1 = 0  (first zero)"


def test_cli_trace_quasi_translation(capsys):
    code, out, _ = _run(capsys, "trace", str(CORPUS / "quasi_translation.map"), "--component", "1", "--steps", "3")
    assert code == 0
    assert out.splitlines()[-1] == "P_2 = 0  (first zero)"


def test_cli_trace_bad_component(capsys):
    code, _, err = _run(capsys, "trace", GZ_FILE, "--component", "5")
    assert code == 1 and "component" in err


def test_cli_check_keller(capsys, bad_map):
    assert _run(capsys, "check-keller", EX41_FILE)[:2] == (0, "Keller: yes\n")
    code, out, _ = _run(capsys, "check-keller", bad_map)
    assert code == 2 and out == "Keller: no, det = 1 - 4*x*y\n"


def test_cli_oracle(capsys):
    code, out, _ = _run(capsys, "oracle", EX41_FILE)
    assert code == 0 and "G1 = x - y^2" in out


def test_cli_compare(capsys):
    code, out, _ = _run(capsys, "compare", GZ_FILE)
    assert code == 0 and out.startswith("agree")


def test_cli_deterministic(capsys, bad_map):
    for argv in (["invert", GZ_FILE], ["invert", bad_map], ["trace", GZ_FILE, "--component", "1", "--steps", "4"]):
        first = _run(capsys, *argv)
        assert _run(capsys, *argv) == first


def test_cli_write_corpus(capsys, tmp_path):
    code, out, _ = _run(capsys, "write-corpus", str(tmp_path))
    assert code == 0
    assert (tmp_path / "gorni_zampieri.map").exists()


def test_parse_poly_trailing_newlines():
    x, y = X(2)
    assert parse_poly("x*y\n\n", ["x", "y"]) == x * y
    with pytest.raises(ParseError, match="trailing"):
        parse_poly("x\ny", ["x", "y"])

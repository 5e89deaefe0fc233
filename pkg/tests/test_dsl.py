from fractions import Fraction

import pytest

from cvstab.dsl import parse, parse_rational
from cvstab.errors import ParseError


def test_minimal_gkp():
    c = parse("code gkp d1=2\ndispq 0 1/2\nhomodyne 0\n")
    assert c.family == "gkp" and c.n_modes == 1
    assert [g.kind for g in c.gates] == ["dispq", "homodyne"]
    assert c.gates[0].amount == Fraction(1, 2)
    assert c.gates[0].line == 2


def test_rsb_header_and_inputs():
    c = parse("# cat code\ncode rsb d1=3 N=2 primitive=coherent:4.5 modes=2\ninit 1 2\nxkerr 0 1 -1/36\n")
    assert (c.d1, c.N, c.n_modes) == (3, 2, 2)
    assert c.primitive.alpha == 4.5
    assert c.input_index(1) == 2 and c.input_index(0) == 0
    assert c.input_lines[1] == 3
    assert c.gates[0].params == (Fraction(-1, 36),)


@pytest.mark.parametrize(
    "tok,val",
    [("3", Fraction(3)), ("-2/6", Fraction(-1, 3)), ("sqrt(4)", Fraction(2)), ("1/2*sqrt(9)", Fraction(3, 2)), ("0*pi", Fraction(0))],
)
def test_rational_tokens(tok, val):
    assert parse_rational(tok) == val


@pytest.mark.parametrize("text", ["dispq 0 sqrt(2)", "dispq 0 pi", "dispq 0 0.5", "dispp 0 1/2*sqrt(3)"])
def test_non_rational_amounts_become_nonclifford(text):
    c = parse("code gkp d1=2\n" + text + "\n")
    g = c.gates[0]
    assert g.kind == "nonclifford" and g.label == text and g.line == 2


@pytest.mark.parametrize("form", ["", " cubic", " quartic"])
def test_tgate(form):
    c = parse(f"code rsb d1=2 N=2\ntgate 0{form}\n")
    assert c.gates[0].kind == "nonclifford"
    assert "T gate" in c.gates[0].reason


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("code gkp d1=2\ndispq 0 1/0\n", 2, 9),
        ("code gkp d1=2\ndispq 0 1234567890123456789/2\n", 2, 9),
        ("code gkp d1=2\nteleport 0\n", 2, 1),
        ("code gkp d1=2 modes=1\ndispq 1 1/2\n", 2, 7),
        ("code gkp d1=2\nkerr 0 1/2 0\n", 2, 1),
        ("code qkd d1=2\n", 1, 6),
        ("code rsb d1=2\n", 1, 1),
        ("dispq 0 1\n", 1, 1),
        ("code gkp d1=2\ndispq 0 1/2\ninit 0 1\n", 3, 1),
        ("code gkp d1=2\ninit 0 2\n", 2, 8),
        ("code gkp d1=2\ncz 0 0\n", 2, 6),
        ("code gkp d1=2\ndispq 0 abc\n", 2, 9),
        ("code gkp d1=2\ncode gkp d1=2\n", 2, 1),
        ("", 1, 1),
    ],
)
def test_parse_errors_report_position(text, line, col):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert (exc.value.line, exc.value.column) == (line, col)


def test_comments_and_blank_lines_ignored():
    c = parse("\n# header next\ncode gkp d1=2  # qubit\n\nfourier 0 # H\n")
    assert len(c.gates) == 1 and c.gates[0].line == 5

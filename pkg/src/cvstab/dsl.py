"""Parser for the line-based circuit format.

    # comments start with '#'
    code gkp d1=2 modes=1
    init 0 1
    dispq 0 1/2
    homodyne 0

    code rsb d1=2 N=4 primitive=coherent:4
    rot 0 1/16
    kerr 0 1/32 0
    xkerr 0 1 1/8
    tfourier 0
    phasemeas 0

Numeric arguments must be exact rationals (``p`` or ``p/q``).  Irrational
forms such as ``sqrt(2)``, ``pi`` or ``1/2*sqrt(3)`` and decimal literals
parse, but turn the gate into a non-Clifford placeholder that the
embedding resolver rejects with the line number.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import isqrt

from .circuit import CvCircuit, Primitive
from .errors import ParseError
from .gkp import GkpGate
from .rsb import RsbGate

MAX_DIGITS = 18

_RATIONAL = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")
_SQRT = re.compile(r"^(?:([+-]?\d+(?:/\d+)?)\*)?sqrt\((\d+)\)$")
_PI = re.compile(r"^(?:([+-]?\d+(?:/\d+)?)\*)?pi$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.\d*|\.\d+)([eE][+-]?\d+)?$|^[+-]?\d+[eE][+-]?\d+$")

_GKP_ARGS = {
    "dispq": ("mode", "amount"),
    "dispp": ("mode", "amount"),
    "shear": ("mode",),
    "shearodd": ("mode", "amount"),
    "fourier": ("mode",),
    "cz": ("mode", "mode"),
    "homodyne": ("mode",),
}
_RSB_ARGS = {
    "rot": ("mode", "amount"),
    "kerr": ("mode", "amount", "amount"),
    "xkerr": ("mode", "mode", "amount"),
    "tfourier": ("mode",),
    "phasemeas": ("mode",),
}
_TGATE_FORMS = ("cubic", "quartic")


class _Irrational:
    def __init__(self, text, why):
        self.text = text
        self.why = why


def parse_rational(tok: str, line=None, column=None):
    """Fraction for exact tokens, _Irrational for recognised non-rational forms."""
    m = _RATIONAL.match(tok)
    if m:
        num, den = m.group(1), m.group(2)
        if len(num.lstrip("+-")) > MAX_DIGITS or (den and len(den) > MAX_DIGITS):
            raise ParseError(f"rational overflow in {tok!r}", line, column)
        den_v = int(den) if den else 1
        if den_v == 0:
            raise ParseError(f"zero denominator in {tok!r}", line, column)
        return Fraction(int(num), den_v)
    m = _SQRT.match(tok)
    if m:
        coef = parse_rational(m.group(1), line, column) if m.group(1) else Fraction(1)
        radicand = int(m.group(2))
        r = isqrt(radicand)
        if r * r == radicand:
            return coef * r
        return _Irrational(tok, "irrational amount")
    m = _PI.match(tok)
    if m:
        coef = parse_rational(m.group(1), line, column) if m.group(1) else Fraction(1)
        if coef == 0:
            return Fraction(0)
        return _Irrational(tok, "irrational amount")
    if _DECIMAL.match(tok):
        return _Irrational(tok, "real-valued amount; write it as an exact fraction p/q")
    raise ParseError(f"cannot read number {tok!r}", line, column)


def _tokens(line):
    """Split on whitespace, keeping 1-based columns."""
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _parse_header(toks, lineno):
    if len(toks) < 2 or toks[0][0] != "code":
        raise ParseError("expected header 'code gkp|rsb d1=<d1> ...'", lineno, toks[0][1] if toks else 1)
    family = toks[1][0]
    if family not in ("gkp", "rsb"):
        raise ParseError(f"unknown code family {family!r}", lineno, toks[1][1])
    kv = {}
    for tok, col in toks[2:]:
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}", lineno, col)
        k, v = tok.split("=", 1)
        if k in kv:
            raise ParseError(f"duplicate header key {k!r}", lineno, col)
        kv[k] = (v, col)
    allowed = {"gkp": {"d1", "modes"}, "rsb": {"d1", "N", "primitive", "modes"}}[family]
    for k, (_, col) in kv.items():
        if k not in allowed:
            raise ParseError(f"unknown header key {k!r} for {family}", lineno, col)

    def int_field(name, minimum):
        if name not in kv:
            return None
        v, col = kv[name]
        if not re.fullmatch(r"\d+", v):
            raise ParseError(f"{name} must be a positive integer", lineno, col)
        iv = int(v)
        if iv < minimum:
            raise ParseError(f"{name} must be at least {minimum}", lineno, col)
        return iv

    d1 = int_field("d1", 2)
    if d1 is None:
        raise ParseError("header needs d1=<dimension>", lineno, toks[0][1])
    modes = int_field("modes", 1)
    N = int_field("N", 1)
    primitive = None
    if family == "rsb":
        if N is None:
            raise ParseError("rsb header needs N=<rotation order>", lineno, toks[0][1])
        primitive = Primitive("ideal")
        if "primitive" in kv:
            v, col = kv["primitive"]
            if v == "ideal":
                primitive = Primitive("ideal")
            elif v.startswith("coherent:"):
                try:
                    alpha = float(v.split(":", 1)[1])
                except ValueError:
                    raise ParseError(f"bad coherent amplitude in {v!r}", lineno, col) from None
                if not alpha > 0:
                    raise ParseError("coherent amplitude must be positive", lineno, col)
                primitive = Primitive("coherent", alpha)
            else:
                raise ParseError(f"unknown primitive {v!r}", lineno, col)
    return family, d1, modes, N, primitive


def parse(text: str) -> CvCircuit:
    """Parse circuit text into a CvCircuit; raises ParseError with line and column."""
    header = None
    gates = []
    inputs = {}
    input_lines = {}
    max_mode = -1
    declared_modes = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        if header is None:
            header = _parse_header(toks, lineno)
            family, d1, declared_modes, N, primitive = header
            continue
        if toks[0][0] == "code":
            raise ParseError("only one header line is allowed", lineno, toks[0][1])
        word, col0 = toks[0]

        def mode_arg(tok, col):
            if not re.fullmatch(r"\d+", tok):
                raise ParseError(f"mode index must be a non-negative integer, got {tok!r}", lineno, col)
            m = int(tok)
            if declared_modes is not None and m >= declared_modes:
                raise ParseError(f"mode {m} not declared (modes={declared_modes})", lineno, col)
            return m

        if word == "init":
            if len(toks) != 3:
                raise ParseError("init takes <mode> <j>", lineno, col0)
            m = mode_arg(*toks[1])
            if not re.fullmatch(r"\d+", toks[2][0]):
                raise ParseError("logical index must be a non-negative integer", lineno, toks[2][1])
            j = int(toks[2][0])
            if j >= d1:
                raise ParseError(f"logical index {j} outside [0, {d1})", lineno, toks[2][1])
            if m in inputs:
                raise ParseError(f"mode {m} initialised twice", lineno, col0)
            if gates:
                raise ParseError("init lines must precede gates", lineno, col0)
            inputs[m] = j
            input_lines[m] = lineno
            max_mode = max(max_mode, m)
            continue

        label = " ".join(t for t, _ in toks)
        if word == "tgate":
            if len(toks) not in (2, 3):
                raise ParseError("tgate takes <mode> [cubic|quartic]", lineno, col0)
            m = mode_arg(*toks[1])
            form = toks[2][0] if len(toks) == 3 else "quartic"
            if form not in _TGATE_FORMS:
                raise ParseError(f"unknown tgate form {form!r}", lineno, toks[2][1])
            reason = f"{form} phase polynomial (T gate) is outside the Clifford group"
            if family == "gkp":
                gates.append(GkpGate("nonclifford", (m,), label=label, line=lineno, reason=reason))
            else:
                gates.append(RsbGate("nonclifford", (m,), label=label, line=lineno, reason=reason))
            max_mode = max(max_mode, m)
            continue

        table = _GKP_ARGS if family == "gkp" else _RSB_ARGS
        if word not in table:
            raise ParseError(f"unknown directive {word!r} for {family} circuits", lineno, col0)
        spec = table[word]
        if len(toks) - 1 != len(spec):
            raise ParseError(f"{word} takes {len(spec)} argument(s), got {len(toks) - 1}", lineno, col0)
        modes, amounts = [], []
        for (tok, col), kind in zip(toks[1:], spec):
            if kind == "mode":
                modes.append(mode_arg(tok, col))
            else:
                amounts.append(parse_rational(tok, lineno, col))
        if len(modes) == 2 and modes[0] == modes[1]:
            raise ParseError(f"{word} needs two distinct modes", lineno, toks[2][1])
        max_mode = max([max_mode, *modes])
        irr = [a for a in amounts if isinstance(a, _Irrational)]
        if family == "gkp":
            if irr:
                gates.append(GkpGate("nonclifford", tuple(modes), label=label, line=lineno, reason=irr[0].why))
            else:
                gates.append(GkpGate(word, tuple(modes), amounts[0] if amounts else None, line=lineno))
        else:
            if irr:
                gates.append(RsbGate("nonclifford", tuple(modes), label=label, line=lineno, reason=irr[0].why))
            else:
                gates.append(RsbGate(word, tuple(modes), tuple(amounts), line=lineno))
    if header is None:
        raise ParseError("empty circuit: missing 'code' header", 1, 1)
    family, d1, declared_modes, N, primitive = header
    n_modes = declared_modes if declared_modes is not None else max(1, max_mode + 1)
    return CvCircuit(family, d1, n_modes, gates, inputs, input_lines, N=N, primitive=primitive)


def parse_file(path) -> CvCircuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())

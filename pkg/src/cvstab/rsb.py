"""Rotation-symmetric bosonic circuits: gates, embeddings, compilation.

A d-level code with M-fold rotation symmetry has

    Z  = exp(i 2 pi n / (d M))
    S  = exp(i pi (n^2 / M^2 - beta n / M) / d)     beta = d mod 2
    CZ = exp(i 2 pi n_k n_l / (d M^2))

and the Fourier gate is realised by a teleportation gadget that succeeds
with probability 1/d.  A circuit written for (d1, N) is reinterpreted in
one of two ways:

* method one: d2 = d1 a^2 with M2 = N / a (a divides N), any inputs;
* method two: any d2 with M2 = d1 N, inputs restricted to |0>, which is
  read as |+> of the d2 code.

All parameters are rationals multiplying 2 pi, so matching a gate to a
d2 Clifford is an integrality test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from . import tableau as tb
from .circuit import CvCircuit, Primitive
from .encoding import EmbeddingParams, encode_product_state
from .errors import GateNotAdmitted, MethodTwoInputViolation, NonCliffordGate
from .oracles import fock
from .program import CliffordProgram
from .zmod import divisors

KINDS = ("rot", "kerr", "xkerr", "tfourier", "phasemeas", "nonclifford")
METHOD_TWO_SEARCH_CAP = 4096


@dataclass(frozen=True)
class RsbGate:
    """``rot``: exp(i 2 pi r n); ``kerr``: exp(i 2 pi (u n^2 + v n));
    ``xkerr``: exp(i 2 pi w n_k n_l)."""

    kind: str
    modes: tuple
    params: tuple = ()
    label: str = ""
    line: int | None = None
    reason: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown RSB gate kind {self.kind!r}")
        need = {"rot": 1, "kerr": 2, "xkerr": 1}.get(self.kind, 0)
        if len(self.params) != need or not all(isinstance(p, Fraction) for p in self.params):
            raise TypeError(f"{self.kind} needs {need} exact Fraction parameter(s)")
        arity = 2 if self.kind == "xkerr" else 1
        if self.kind != "nonclifford" and len(self.modes) != arity:
            raise ValueError(f"{self.kind} acts on {arity} mode(s)")
        if self.kind == "xkerr" and self.modes[0] == self.modes[1]:
            raise ValueError("xkerr needs two distinct modes")

    def describe(self):
        if self.label:
            return self.label
        return " ".join([self.kind, *map(str, self.modes), *map(str, self.params)])


@dataclass(frozen=True)
class RsbEmbeddingPlan:
    method: str
    d1: int
    N: int
    a: int | None
    d2: int
    M2: int

    @property
    def beta(self):
        return self.d2 % 2

    @property
    def z_unit(self) -> Fraction:
        """Rotation fraction of Z_{d2}."""
        return Fraction(1, self.d2 * self.M2)

    @property
    def s_params(self):
        """(u, v) of S_{d2} in exp(i 2 pi (u n^2 + v n))."""
        return (
            Fraction(1, 2 * self.d2 * self.M2 ** 2),
            Fraction(-self.beta, 2 * self.d2 * self.M2),
        )

    @property
    def cz_unit(self) -> Fraction:
        return Fraction(1, self.d2 * self.M2 ** 2)

    def as_dict(self):
        return {
            "family": "rsb",
            "method": self.method,
            "d1": self.d1,
            "N": self.N,
            "a": self.a,
            "d2": self.d2,
            "M2": self.M2,
        }


def method_one_plan(d1, N, a) -> RsbEmbeddingPlan:
    if N % a:
        raise ValueError(f"a={a} does not divide N={N}")
    return RsbEmbeddingPlan("one", d1, N, a, d1 * a * a, N // a)


def method_two_plan(d1, N, d2) -> RsbEmbeddingPlan:
    if d2 < 2:
        raise ValueError("d2 must be at least 2")
    return RsbEmbeddingPlan("two", d1, N, None, d2, d1 * N)


def match_gate(plan: RsbEmbeddingPlan, g: RsbGate):
    """Tableau instructions for ``g`` under ``plan`` as a list of
    (op, qudits, power, meta), or None when ``g`` is not a d2 Clifford."""
    if g.kind == "rot":
        k = g.params[0] / plan.z_unit
        if k.denominator != 1:
            return None
        return [("Z", g.modes, int(k.numerator))]
    if g.kind == "kerr":
        u, v = g.params
        u0, v0 = plan.s_params
        m = u / u0
        if m.denominator != 1:
            return None
        k = (v - m * v0) / plan.z_unit
        if k.denominator != 1:
            return None
        ops = []
        if m.numerator % (2 * plan.d2):
            ops.append(("S", g.modes, int(m.numerator)))
        if k.numerator % plan.d2:
            ops.append(("Z", g.modes, int(k.numerator)))
        return ops
    if g.kind == "xkerr":
        c = g.params[0] / plan.cz_unit
        if c.denominator != 1:
            return None
        return [("CZ", g.modes, int(c.numerator))]
    if g.kind == "tfourier":
        return [("F", g.modes, 1)]
    if g.kind == "phasemeas":
        return [("M", g.modes, 1)]
    return None


def _all_match(plan, gates):
    return all(match_gate(plan, g) is not None for g in gates)


def _method_one_candidates(d1, N):
    return [method_one_plan(d1, N, a) for a in divisors(N)]


def _method_two_bound(gates):
    dens = [1]
    for g in gates:
        dens.extend(p.denominator for p in g.params)
    return min(2 * lcm(*dens) + 2, METHOD_TWO_SEARCH_CAP)


def _method_two_candidates(d1, N, gates):
    return (method_two_plan(d1, N, d2) for d2 in range(2, _method_two_bound(gates) + 1))


def resolve_embedding_rsb(circuit: CvCircuit, method_hint: str | None = None) -> RsbEmbeddingPlan:
    """Choose the embedding: smallest admissible a for method one, else the
    smallest d2 for method two (only method one or two when hinted)."""
    if circuit.family != "rsb":
        raise ValueError("not an RSB circuit")
    if method_hint not in (None, "one", "two"):
        raise ValueError(f"unknown method {method_hint!r}")
    d1, N = circuit.d1, circuit.N
    gates = circuit.gates
    for g in gates:
        if g.kind == "nonclifford":
            raise NonCliffordGate(g.describe(), g.line, g.reason or "not in the recognised Clifford set")
    plan = None
    if method_hint in (None, "one"):
        plan = next((p for p in _method_one_candidates(d1, N) if _all_match(p, gates)), None)
    if plan is None and method_hint in (None, "two"):
        plan = next((p for p in _method_two_candidates(d1, N, gates) if _all_match(p, gates)), None)
    if plan is None:
        _explain_rejection(circuit, method_hint)
    if plan.method == "two":
        for m in range(circuit.n_modes):
            j = circuit.input_index(m)
            if j != 0:
                raise MethodTwoInputViolation(m, j, circuit.input_lines.get(m))
    return plan


def _explain_rejection(circuit, method_hint):
    d1, N, gates = circuit.d1, circuit.N, circuit.gates
    pools = []
    if method_hint in (None, "one"):
        pools.extend(_method_one_candidates(d1, N))
    if method_hint in (None, "two"):
        pools.extend(_method_two_candidates(d1, N, gates))
    for g in gates:
        if not any(match_gate(p, g) is not None for p in pools):
            raise NonCliffordGate(g.describe(), g.line, "no embedding makes this gate a Clifford")
    g = gates[0] if gates else None
    raise NonCliffordGate(
        g.describe() if g else "circuit",
        g.line if g else None,
        "gates match different embedding methods; mixing them is refused",
    )


def compile_gate_rsb(plan: RsbEmbeddingPlan, g: RsbGate, n_modes: int, key=None) -> CliffordProgram:
    ops = match_gate(plan, g)
    if ops is None:
        raise GateNotAdmitted(f"{g.describe()} does not match d2={plan.d2}, M2={plan.M2}")
    prog = CliffordProgram(plan.d2, n_modes)
    meta = {"line": g.line} if g.line is not None else {}
    for op, modes, power in ops:
        if op == "Z":
            prog.z(modes[0], power, **meta)
        elif op == "S":
            prog.phase(modes[0], power, **meta)
        elif op == "CZ":
            prog.cz(modes[0], modes[1], power, **meta)
        elif op == "F":
            prog.fourier(
                modes[0],
                gadget="teleported_fourier",
                mode=modes[0],
                success_probability=Fraction(1, plan.d2),
                **meta,
            )
        elif op == "M":
            prog.measure(modes[0], key=key if key is not None else f"n{modes[0]}", **meta)
    return prog


@dataclass
class CompiledRsb:
    plan: RsbEmbeddingPlan
    program: CliffordProgram
    initial_state: tb.Tableau
    keys: list
    key_modes: dict


def compile_circuit_rsb(circuit: CvCircuit, plan: RsbEmbeddingPlan | None = None, method_hint=None):
    from .gkp import measurement_keys

    if plan is None:
        plan = resolve_embedding_rsb(circuit, method_hint)
    keys = iter(measurement_keys(circuit.gates, "phasemeas"))
    prog = CliffordProgram(plan.d2, circuit.n_modes)
    key_modes = {}
    for g in circuit.gates:
        key = next(keys) if g.kind == "phasemeas" else None
        if key is not None:
            key_modes[key] = g.modes[0]
        prog.extend(compile_gate_rsb(plan, g, circuit.n_modes, key))
    if plan.method == "one":
        js = [circuit.input_index(m) for m in range(circuit.n_modes)]
        state = encode_product_state(EmbeddingParams(plan.d1, plan.a), js)
    else:
        # |0_{d1};N> is |+_{d2};d1 N>
        state = tb.apply_fourier(tb.new_zero_state(circuit.n_modes, plan.d2), list(range(circuit.n_modes)))
    return CompiledRsb(plan, prog, state, list(key_modes), key_modes)


# ----------------------------------------------------------------------
# codewords in the Fock basis

@dataclass(frozen=True)
class RsbCodewordSpec:
    """|j_d;M> (``basis="z"``) or |u^j_d;M> = F|j> (``basis="x"``)."""

    d: int
    M: int
    j: int
    primitive: Primitive
    basis: str = "z"

    def support(self, n_max):
        """Fock levels that can carry weight."""
        n = np.arange(n_max + 1)
        if self.basis == "z":
            return n[(n % (self.d * self.M)) == self.j * self.M]
        return n[(n % self.M) == 0]

    def fock(self, n_max=None, normalization="codeword"):
        if self.basis == "z":
            return fock.codeword(self.d, self.M, self.j, self.primitive, n_max, normalization)
        return fock.xbasis_codeword(self.d, self.M, self.j, self.primitive, n_max)


def rsb_codeword_fock(spec: RsbCodewordSpec, n_max=None, normalization="codeword") -> np.ndarray:
    return spec.fock(n_max, normalization)


def xbasis_codeword(d2, M2, primitive):
    """The d2 X-basis codewords; element 0 is |+_{d2};M2>."""
    return [RsbCodewordSpec(d2, M2, k, primitive, basis="x") for k in range(d2)]


def method1_identity_check(d1, N, a, j, primitive, n_max=None, normalization="codeword") -> float:
    """Fidelity of |j_{d1};N> with a^{-1/2} sum_t |(a j + a d1 t)_{d2}; N/a>."""
    if N % a:
        raise ValueError(f"a={a} does not divide N={N}")
    if n_max is None:
        n_max = fock.default_nmax(primitive.alpha)
    d2, M2 = d1 * a * a, N // a
    lhs = fock.codeword(d1, N, j, primitive, n_max, normalization)
    rhs = sum(
        fock.codeword(d2, M2, (a * j + a * d1 * t) % d2, primitive, n_max, normalization)
        for t in range(a)
    ) / np.sqrt(a)
    return fock.fidelity(lhs, rhs)


def orthogonality_defect(primitive, d, M, n_max=None) -> float:
    return fock.orthogonality_defect(primitive, d, M, n_max)

"""GKP circuits: gate descriptors, choice of embedding, compilation.

Amounts are exact rationals in units of alpha_1 = sqrt(2 pi / d1).  After
embedding in d2 = d1 A^2 the lattice unit is alpha_2 = alpha_1 / A, and
the gates act on the peak index k (position q = alpha_2 k) as

    dispq t   e^{-i t alpha_1 p}             -> X^{t A}
    dispp t   e^{+i t alpha_1 q}             -> Z^{t A}
    fourier   e^{i pi (p^2 + q^2) / 4}       -> F
    shear     e^{i q^2 / 2}                  -> S      (even d2)
    shearodd  e^{i (q^2 - 2 c q) / 2}        -> S Z^{-(2Ac - 1)/2}   (odd d2)
    cz        e^{i q_k q_l}                  -> CZ
    homodyne  position measurement           -> Z-basis measurement
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm, pi, sqrt

import numpy as np

from . import tableau as tb
from .circuit import CvCircuit
from .encoding import EmbeddingParams, encode_product_state
from .errors import GateNotAdmitted, NonCliffordGate
from .program import CliffordProgram

KINDS = ("dispq", "dispp", "shear", "shearodd", "fourier", "cz", "homodyne", "nonclifford")
_ARITY = {"dispq": 1, "dispp": 1, "shear": 1, "shearodd": 1, "fourier": 1, "cz": 2, "homodyne": 1}


@dataclass(frozen=True)
class GkpGate:
    kind: str
    modes: tuple
    amount: Fraction | None = None
    label: str = ""
    line: int | None = None
    reason: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown GKP gate kind {self.kind!r}")
        if self.kind in _ARITY and len(self.modes) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} mode(s)")
        if self.kind == "cz" and self.modes[0] == self.modes[1]:
            raise ValueError("cz needs two distinct modes")
        if self.kind in ("dispq", "dispp", "shearodd"):
            if not isinstance(self.amount, Fraction):
                raise TypeError(f"{self.kind} needs an exact Fraction amount")

    def describe(self):
        if self.label:
            return self.label
        parts = [self.kind, *map(str, self.modes)]
        if self.amount is not None:
            parts.append(str(self.amount))
        return " ".join(parts)


@dataclass(frozen=True)
class GkpEmbeddingPlan:
    d1: int
    A: int
    parity_fix: bool = False

    @property
    def d2(self) -> int:
        return self.d1 * self.A * self.A

    @property
    def params(self) -> EmbeddingParams:
        return EmbeddingParams(self.d1, self.A)

    @property
    def alpha1(self) -> float:
        return sqrt(2 * pi / self.d1)

    @property
    def alpha2(self) -> float:
        return sqrt(2 * pi / self.d2)

    def as_dict(self):
        return {"family": "gkp", "d1": self.d1, "a": self.A, "d2": self.d2, "parity_fix": self.parity_fix}


def _reject(g: GkpGate):
    raise NonCliffordGate(g.describe(), g.line, g.reason or "not in the recognised Clifford set")


def resolve_embedding(circuit: CvCircuit) -> GkpEmbeddingPlan:
    """Smallest A such that every gate compiles exactly in d2 = d1 A^2.

    A is the lcm of the displacement denominators.  A plain shear needs
    even d2, so A is doubled when d1 A^2 comes out odd.  An explicit
    ``shearodd`` with offset c needs odd d2 and 2 A c odd.
    """
    if circuit.family != "gkp":
        raise ValueError("not a GKP circuit")
    d1 = circuit.d1
    A = 1
    has_shear = False
    odd_shears = []
    for g in circuit.gates:
        if g.kind == "nonclifford":
            _reject(g)
        if g.kind in ("dispq", "dispp"):
            A = lcm(A, g.amount.denominator)
        elif g.kind == "shear":
            has_shear = True
        elif g.kind == "shearodd":
            q = g.amount.denominator
            if q % 2:
                raise NonCliffordGate(g.describe(), g.line, "shear offset must be an odd multiple of 1/(2A)")
            odd_shears.append(g)
            A = lcm(A, q // 2)
    parity_fix = False
    if odd_shears:
        if has_shear:
            g = odd_shears[0]
            raise NonCliffordGate(g.describe(), g.line, "shear and shearodd need opposite parities of d2")
        if (d1 * A * A) % 2 == 0:
            g = odd_shears[0]
            raise NonCliffordGate(g.describe(), g.line, f"no odd embedding dimension exists for d1={d1}")
        for g in odd_shears:
            k = 2 * A * g.amount
            if k.denominator != 1 or k.numerator % 2 == 0:
                raise NonCliffordGate(g.describe(), g.line, "shear offset must be an odd multiple of 1/(2A)")
    elif has_shear and (d1 * A * A) % 2 == 1:
        A *= 2
        parity_fix = True
    return GkpEmbeddingPlan(d1, A, parity_fix)


def _integer_power(plan, g):
    k = g.amount * plan.A
    if k.denominator != 1:
        raise GateNotAdmitted(f"{g.describe()}: amount {g.amount} is not a multiple of 1/{plan.A}")
    return int(k.numerator)


def compile_gate(plan: GkpEmbeddingPlan, g: GkpGate, n_modes: int, key: str | None = None) -> CliffordProgram:
    """Tableau instructions realising one GKP gate in dimension d2."""
    prog = CliffordProgram(plan.d2, n_modes)
    meta = {"line": g.line} if g.line is not None else {}
    m = g.modes
    if g.kind == "dispq":
        prog.x(m[0], _integer_power(plan, g), **meta)
    elif g.kind == "dispp":
        prog.z(m[0], _integer_power(plan, g), **meta)
    elif g.kind == "fourier":
        prog.fourier(m[0], **meta)
    elif g.kind == "shear":
        if plan.d2 % 2:
            raise GateNotAdmitted("shear needs an even embedding dimension")
        prog.phase(m[0], **meta)
    elif g.kind == "shearodd":
        k = 2 * plan.A * g.amount
        if plan.d2 % 2 == 0 or k.denominator != 1 or k.numerator % 2 == 0:
            raise GateNotAdmitted(f"{g.describe()} not admitted by d2={plan.d2}")
        prog.phase(m[0], **meta)
        shift = -(k.numerator - 1) // 2
        if shift % plan.d2:
            prog.z(m[0], shift, **meta)
    elif g.kind == "cz":
        prog.cz(m[0], m[1], **meta)
    elif g.kind == "homodyne":
        prog.measure(m[0], key=key if key is not None else f"q{m[0]}", **meta)
    else:
        _reject(g)
    return prog


@dataclass
class CompiledCircuit:
    plan: object
    program: CliffordProgram
    initial_state: tb.Tableau
    keys: list
    key_modes: dict


def measurement_keys(gates, kind):
    """Unique keys for measurement gates: ``q<mode>``, then ``q<mode>#2``..."""
    prefix = "q" if kind == "homodyne" else "n"
    seen = {}
    keys = []
    for g in gates:
        if g.kind != kind:
            continue
        m = g.modes[0]
        seen[m] = seen.get(m, 0) + 1
        keys.append(f"{prefix}{m}" if seen[m] == 1 else f"{prefix}{m}#{seen[m]}")
    return keys


def compile_circuit(circuit: CvCircuit, plan: GkpEmbeddingPlan | None = None) -> CompiledCircuit:
    if plan is None:
        plan = resolve_embedding(circuit)
    keys = iter(measurement_keys(circuit.gates, "homodyne"))
    prog = CliffordProgram(plan.d2, circuit.n_modes)
    key_modes = {}
    for g in circuit.gates:
        key = next(keys) if g.kind == "homodyne" else None
        if key is not None:
            key_modes[key] = g.modes[0]
        prog.extend(compile_gate(plan, g, circuit.n_modes, key))
    js = [circuit.input_index(m) for m in range(circuit.n_modes)]
    for m, j in enumerate(js):
        if not 0 <= j < circuit.d1:
            raise ValueError(f"input index {j} on mode {m} outside [0, {circuit.d1})")
    state = encode_product_state(plan.params, js)
    return CompiledCircuit(plan, prog, state, list(key_modes), key_modes)


@dataclass(frozen=True)
class HomodyneOutcome:
    d2_index: int
    position_residue: float
    logical: int | None


def homodyne_outcome_decode(plan: GkpEmbeddingPlan, outcome: int) -> HomodyneOutcome:
    """Peak class, position modulo the lattice period, and logical value if any."""
    j = int(outcome) % plan.d2
    period = sqrt(2 * pi * plan.d2)
    residue = (plan.alpha2 * j) % period
    logical = (j // plan.A) % plan.d1 if j % plan.A == 0 else None
    return HomodyneOutcome(j, residue, logical)


def cv_phase(plan: GkpEmbeddingPlan, g: GkpGate, q) -> np.ndarray:
    """Phase angle the diagonal CV gate imprints at position(s) ``q``.

    For ``cz`` pass ``q`` as a pair of arrays.
    """
    if g.kind == "shear":
        return np.asarray(q) ** 2 / 2
    if g.kind == "shearodd":
        c = float(g.amount) * plan.alpha1
        q = np.asarray(q)
        return (q * q - 2 * c * q) / 2
    if g.kind == "dispp":
        return float(g.amount) * plan.alpha1 * np.asarray(q)
    if g.kind == "cz":
        return np.asarray(q[0]) * np.asarray(q[1])
    raise ValueError(f"{g.kind} is not diagonal in position")

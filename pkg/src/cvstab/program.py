"""A small instruction list for qudit Clifford circuits with measurement.

Compilers emit ``CliffordProgram`` objects; ``execute`` runs one shot
(sampled or with forced outcomes) and ``enumerate_branches`` walks every
measurement branch exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import tableau as tb
from .errors import ContradictionError

GATE_OPS = ("F", "Finv", "S", "Sinv", "SUM", "CZ", "X", "Z")


@dataclass(frozen=True)
class Instruction:
    """One step of a program.

    ``op`` is a gate name from GATE_OPS, ``"M"`` (Z measurement stored
    under ``key``), ``"XFB"`` (apply X**(coeff * outcome[key] / divisor)),
    or ``"DISCARD"``.  ``meta`` carries provenance such as the source line
    or gadget bookkeeping.
    """

    op: str
    qudits: tuple
    power: int = 1
    key: str | None = None
    coeff: int = 1
    divisor: int = 1
    meta: tuple = ()

    def meta_dict(self):
        return dict(self.meta)


@dataclass
class CliffordProgram:
    d: int
    n: int
    instructions: list = field(default_factory=list)

    def _add(self, op, qudits, **kw):
        self.instructions.append(Instruction(op, tuple(int(q) for q in qudits), **kw))
        return self

    def fourier(self, k, **meta):
        return self._add("F", [k], meta=tuple(meta.items()))

    def fourier_inverse(self, k, **meta):
        return self._add("Finv", [k], meta=tuple(meta.items()))

    def phase(self, k, power=1, **meta):
        return self._add("S", [k], power=power, meta=tuple(meta.items()))

    def sum(self, control, target, power=1, **meta):
        return self._add("SUM", [control, target], power=power, meta=tuple(meta.items()))

    def cz(self, control, target, power=1, **meta):
        return self._add("CZ", [control, target], power=power, meta=tuple(meta.items()))

    def x(self, k, power=1, **meta):
        return self._add("X", [k], power=power, meta=tuple(meta.items()))

    def z(self, k, power=1, **meta):
        return self._add("Z", [k], power=power, meta=tuple(meta.items()))

    def measure(self, k, key=None, **meta):
        return self._add("M", [k], key=key if key is not None else f"m{len(self.instructions)}",
                         meta=tuple(meta.items()))

    def feedback_x(self, k, key, coeff=1, divisor=1, **meta):
        return self._add("XFB", [k], key=key, coeff=coeff, divisor=divisor, meta=tuple(meta.items()))

    def discard(self, k):
        return self._add("DISCARD", [k])

    def extend(self, other: "CliffordProgram"):
        self.instructions.extend(other.instructions)
        return self

    @property
    def measurement_keys(self):
        return [ins.key for ins in self.instructions if ins.op == "M"]

    def terminal_measurements(self):
        """Measured qudits if every measurement comes after every other step."""
        seen_m = False
        ks = []
        for ins in self.instructions:
            if ins.op == "M":
                seen_m = True
                if ins.qudits[0] in ks:
                    return None
                ks.append(ins.qudits[0])
            elif seen_m:
                return None
        return ks

    def __str__(self):
        lines = [f"program d={self.d} n={self.n}"]
        for ins in self.instructions:
            q = " ".join(map(str, ins.qudits))
            extra = ""
            if ins.op in ("S", "SUM", "CZ", "X", "Z") and ins.power != 1:
                extra = f" ^{ins.power}"
            if ins.op == "M":
                extra = f" -> {ins.key}"
            if ins.op == "XFB":
                extra = f" ^({ins.coeff}*{ins.key}/{ins.divisor})"
            lines.append(f"{ins.op} {q}{extra}")
        return "\n".join(lines)


def apply_gate(state: tb.Tableau, ins: Instruction) -> tb.Tableau:
    op, q, p = ins.op, ins.qudits, ins.power
    d = state.d
    if op == "F":
        return tb.apply_fourier(state, q[0])
    if op == "Finv":
        return tb.apply_fourier_inverse(state, q[0])
    if op == "S":
        p %= 2 * d
        for _ in range(p):
            state = tb.apply_phase_gate(state, q[0])
        return state
    if op == "Sinv":
        return tb.apply_phase_gate_inverse(state, q[0])
    if op == "SUM":
        return tb.apply_sum(state, q[0], q[1], p % d)
    if op == "CZ":
        return tb.apply_cz(state, q[0], q[1], p % d)
    if op == "X":
        return tb.apply_x(state, q[0], p % d)
    if op == "Z":
        return tb.apply_z(state, q[0], p % d)
    raise ValueError(f"not a gate instruction: {op}")


@dataclass
class ExecutionResult:
    state: tb.Tableau
    records: dict
    events: list

    @property
    def outcomes(self):
        return {k: r.outcome for k, r in self.records.items()}


def _feedback_power(ins, outcomes, d):
    num = ins.coeff * outcomes[ins.key]
    if num % ins.divisor:
        raise ContradictionError(
            f"feedback on {ins.key}: {ins.coeff}*{outcomes[ins.key]} not divisible by {ins.divisor}"
        )
    return (num // ins.divisor) % d


def execute(program: CliffordProgram, state: tb.Tableau | None = None, rng=None, forced=None):
    """Run one shot.  ``forced`` maps measurement keys to outcomes."""
    if state is None:
        state = tb.new_zero_state(program.n, program.d)
    if state.d != program.d or state.n != program.n:
        raise ValueError("initial state does not match the program register")
    forced = dict(forced or {})
    records = {}
    events = []
    for ins in program.instructions:
        if ins.op == "M":
            k = ins.qudits[0]
            state, rec = tb.measure_z(state, k, rng=rng, forced=forced.get(ins.key))
            records[ins.key] = rec
        elif ins.op == "XFB":
            outcomes = {key: r.outcome for key, r in records.items()}
            state = tb.apply_x(state, ins.qudits[0], _feedback_power(ins, outcomes, state.d))
        elif ins.op == "DISCARD":
            state = tb.discard(state, ins.qudits[0])
        else:
            state = apply_gate(state, ins)
        m = ins.meta_dict()
        if "gadget" in m:
            events.append(dict(m))
    return ExecutionResult(state, records, events)


def enumerate_branches(program: CliffordProgram, state=None, cap=4096):
    """Every measurement branch as (probability, outcomes, final state).

    Walks the program depth first, splitting at each measurement over its
    exact coset support.  Raises ValueError when more than ``cap`` branches
    would be produced.
    """
    if state is None:
        state = tb.new_zero_state(program.n, program.d)
    out = []

    def walk(i, st, prob, outcomes):
        for pos in range(i, len(program.instructions)):
            ins = program.instructions[pos]
            if ins.op == "M":
                k = ins.qudits[0]
                dist = tb.outcome_distribution(st, [k])
                for j, p in sorted(dist.marginal(k).items()):
                    post, _ = tb.measure_z(st, k, forced=j)
                    walk(pos + 1, post, prob * p, {**outcomes, ins.key: j})
                return
            if ins.op == "XFB":
                st = tb.apply_x(st, ins.qudits[0], _feedback_power(ins, outcomes, st.d))
            elif ins.op == "DISCARD":
                st = tb.discard(st, ins.qudits[0])
            else:
                st = apply_gate(st, ins)
        if len(out) >= cap:
            raise ValueError(f"more than {cap} measurement branches")
        out.append((prob, outcomes, st))

    walk(0, state, Fraction(1), {})
    return out


def outcome_table(program: CliffordProgram, state=None, cap=4096):
    """Exact joint distribution over measurement keys: {tuple: Fraction}.

    Uses a single coset computation when all measurements are terminal,
    otherwise falls back to branch enumeration.
    """
    if state is None:
        state = tb.new_zero_state(program.n, program.d)
    ks = program.terminal_measurements()
    keys = program.measurement_keys
    if ks is not None and ks:
        st = state
        for ins in program.instructions:
            if ins.op == "M":
                break
            st = apply_gate(st, ins)
        dist = tb.outcome_distribution(st, ks)
        return keys, dist.enumerate(limit=cap)
    table = {}
    for p, outcomes, _ in enumerate_branches(program, state, cap):
        key = tuple(outcomes[k] for k in keys)
        table[key] = table.get(key, Fraction(0)) + p
    return keys, table


def sample(program: CliffordProgram, state=None, shots=1, seed=0):
    """Sample ``shots`` outcome tuples; returns (keys, int array)."""
    if state is None:
        state = tb.new_zero_state(program.n, program.d)
    rng = np.random.default_rng(seed)
    keys = program.measurement_keys
    ks = program.terminal_measurements()
    if ks is not None and ks:
        st = state
        for ins in program.instructions:
            if ins.op == "M":
                break
            st = apply_gate(st, ins)
        return keys, tb.outcome_distribution(st, ks).sample(rng, shots)
    res = np.zeros((shots, len(keys)), dtype=np.int64)
    for s in range(shots):
        r = execute(program, state, rng=rng)
        res[s] = [r.records[k].outcome for k in keys]
    return keys, res


def marginals(keys, table):
    """Per-key marginal distributions from a joint table."""
    out = {k: {} for k in keys}
    for outcome, p in table.items():
        for k, j in zip(keys, outcome):
            out[k][j] = out[k].get(j, Fraction(0)) + p
    return {k: dict(sorted(v.items())) for k, v in out.items()}


__all__ = [
    "CliffordProgram",
    "Instruction",
    "ExecutionResult",
    "execute",
    "enumerate_branches",
    "outcome_table",
    "sample",
    "marginals",
    "apply_gate",
]

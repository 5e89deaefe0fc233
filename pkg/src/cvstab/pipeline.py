"""End-to-end runs: compile a CV circuit, simulate it on the tableau, and
optionally check the result against the dense, grid and Fock oracles.

Reports are plain dictionaries with sorted keys and exact rationals
rendered as strings, so a fixed seed gives a byte-identical JSON dump.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gkp, rsb
from . import tableau as tb
from .circuit import CvCircuit
from .errors import AliasingError
from .encoding import EmbeddingParams, encoding_isometry, logical_value
from .oracles import dense, fock, grid
from .program import apply_gate, marginals, outcome_table, sample

SCHEMA = "cvstab-report/1"
GRID_TOL = 1e-2
DENSE_TOL = 1e-9
MAX_ORACLE_MODES = 2
MAX_GRID_POINTS = 1 << 24
MAX_MEANINGFUL_TOL = 0.1


@dataclass
class Compiled:
    circuit: CvCircuit
    plan: object
    program: object
    initial_state: tb.Tableau
    keys: list
    key_modes: dict

    @property
    def gadgets(self):
        out = []
        for ins in self.program.instructions:
            m = ins.meta_dict()
            if m.get("gadget"):
                out.append(m)
        return out


def compile_circuit(circuit: CvCircuit, method: str | None = None) -> Compiled:
    """Resolve the embedding and emit the tableau program and initial state."""
    if circuit.family == "gkp":
        if method is not None:
            raise ValueError("--method applies to rsb circuits only")
        c = gkp.compile_circuit(circuit)
    else:
        c = rsb.compile_circuit_rsb(circuit, method_hint=method)
    return Compiled(circuit, c.plan, c.program, c.initial_state, c.keys, c.key_modes)


def _frac(p: Fraction) -> str:
    return str(Fraction(p))


def decode(compiled: Compiled, outcome: int) -> dict:
    plan = compiled.plan
    if compiled.circuit.family == "gkp":
        dec = gkp.homodyne_outcome_decode(plan, outcome)
        return {"logical": dec.logical, "position_residue": round(dec.position_residue, 12)}
    if plan.method == "one":
        return {"logical": logical_value(EmbeddingParams(plan.d1, plan.a), outcome)}
    return {"logical": None}


def pre_measurement_state(compiled: Compiled) -> tb.Tableau:
    st = compiled.initial_state
    for ins in compiled.program.instructions:
        if ins.op == "M":
            break
        st = apply_gate(st, ins)
    return st


def strong_block(compiled: Compiled, cap=1 << 16) -> dict:
    keys, table = outcome_table(compiled.program, compiled.initial_state, cap=cap)
    if table and sum(table.values()) != 1:  # pragma: no cover - exactness guard
        raise AssertionError("strong distribution does not sum to 1")
    margs = marginals(keys, table)
    return {
        "keys": keys,
        "joint": {",".join(map(str, o)): _frac(p) for o, p in sorted(table.items())},
        "marginals": {k: {str(j): _frac(p) for j, p in v.items()} for k, v in margs.items()},
        "decoded": {k: {str(j): decode(compiled, j) for j in v} for k, v in margs.items()},
    }


def weak_block(compiled: Compiled, shots: int, seed: int, model_postselection=False) -> dict:
    ss = np.random.SeedSequence(seed)
    s_meas, s_gadget = ss.spawn(2)
    keys, res = sample(compiled.program, compiled.initial_state, shots, seed=s_meas)
    block = {"shots": shots, "seed": seed, "keys": keys}
    kept = np.ones(shots, dtype=bool)
    if model_postselection and compiled.gadgets:
        rng = np.random.default_rng(s_gadget)
        probs = np.array([float(g["success_probability"]) for g in compiled.gadgets])
        kept = (rng.random((shots, probs.size)) < probs).all(axis=1)
        block["postselection"] = {"accepted": int(kept.sum()), "aborted": int((~kept).sum())}
    res = res[kept]
    counts = {}
    for i, k in enumerate(keys):
        vals, cnt = np.unique(res[:, i], return_counts=True) if res.size else ([], [])
        counts[k] = {str(int(v)): int(c) for v, c in zip(vals, cnt)}
    joint = {}
    for row in res.tolist():
        key = ",".join(map(str, row))
        joint[key] = joint.get(key, 0) + 1
    block["counts"] = counts
    block["joint_counts"] = dict(sorted(joint.items()))
    return block


def run(
    circuit: CvCircuit,
    shots: int | None = None,
    seed: int = 0,
    method: str | None = None,
    model_postselection: bool = False,
    verify: bool = False,
    dump_state: bool = False,
    Delta: float = grid.DEFAULT_DELTA,
    delta: float = grid.DEFAULT_DELTA,
    tol: float | None = None,
) -> dict:
    """Compile and simulate; strong mode when ``shots`` is None."""
    compiled = compile_circuit(circuit, method)
    report = {
        "schema": SCHEMA,
        "code": code_block(circuit),
        "plan": compiled.plan.as_dict(),
        "mode": "strong" if shots is None else "weak",
        "gadgets": [
            {"mode": g["mode"], "line": g.get("line"), "success_probability": _frac(g["success_probability"])}
            for g in compiled.gadgets
        ],
    }
    if compiled.gadgets:
        total = Fraction(1)
        for g in compiled.gadgets:
            total *= g["success_probability"]
        report["postselection_probability"] = _frac(total)
    if shots is None:
        report["strong"] = strong_block(compiled)
    else:
        report["weak"] = weak_block(compiled, shots, seed, model_postselection)
    if dump_state:
        report["state"] = tb.to_text(pre_measurement_state(compiled))
    if verify:
        report["verification"] = verify_compiled(compiled, Delta=Delta, delta=delta, tol=tol)
    return report


def code_block(circuit: CvCircuit) -> dict:
    out = {"family": circuit.family, "d1": circuit.d1, "modes": circuit.n_modes}
    if circuit.family == "rsb":
        out["N"] = circuit.N
        out["primitive"] = str(circuit.primitive)
    out["inputs"] = {str(m): circuit.input_index(m) for m in range(circuit.n_modes)}
    return out


# ----------------------------------------------------------------------
# verification

def _tableau_joint(compiled):
    keys, table = outcome_table(compiled.program, compiled.initial_state)
    return keys, table


def _initial_dense(compiled):
    """Dense register vector of the encoded inputs, built from codeword supports."""
    plan = compiled.plan
    n = compiled.circuit.n_modes
    if compiled.circuit.family == "rsb" and plan.method == "two":
        single = [np.ones(plan.d2, dtype=complex) / np.sqrt(plan.d2)] * n
    else:
        a = plan.A if compiled.circuit.family == "gkp" else plan.a
        iso = encoding_isometry(EmbeddingParams(plan.d1, a))
        single = [iso[:, compiled.circuit.input_index(m)] for m in range(n)]
    psi = single[0]
    for v in single[1:]:
        psi = np.kron(psi, v)
    return psi


def dense_check(compiled) -> dict:
    prog = compiled.program
    if prog.terminal_measurements() is None:
        return {"status": "skipped", "reason": "measurements are not all terminal"}
    if prog.d ** prog.n > dense.MAX_DIM:
        return {"status": "skipped", "reason": f"register dimension {prog.d ** prog.n} too large"}
    keys, table = _tableau_joint(compiled)
    ks, probs = dense.terminal_distribution(prog, _initial_dense(compiled))
    dev = 0.0
    for idx in np.ndindex(*probs.shape):
        dev = max(dev, abs(float(table.get(tuple(idx), 0)) - float(probs[idx])))
    return {"status": "ok" if dev <= DENSE_TOL else "mismatch", "max_deviation": dev, "tolerance": DENSE_TOL}


def _measured_modes(compiled):
    modes = [compiled.key_modes[k] for k in compiled.keys]
    if len(set(modes)) != len(modes):
        return None
    gates = compiled.circuit.gates
    seen = False
    for g in gates:
        if g.kind in ("homodyne", "phasemeas"):
            seen = True
        elif seen:
            return None
    return modes


def _compare(tableau_table, oracle_dist):
    dev = 0.0
    for key in set(oracle_dist) | set(tableau_table):
        dev = max(dev, abs(float(tableau_table.get(key, 0)) - oracle_dist.get(key, 0.0)))
    return dev


GRID_WIDENING = (1.0, 1.5, 2.0, 3.0)


def simulate_gkp_grid(circuit: CvCircuit, plan, Delta=grid.DEFAULT_DELTA, delta=grid.DEFAULT_DELTA):
    """Run the physical circuit on the position grid; returns the final GridState.

    The grid is widened step by step while the final state aliases and the
    point budget allows.
    """
    last = None
    for widen in GRID_WIDENING:
        spec = grid.choose_grid(plan.d2, Delta, delta, widen)
        if spec.npts ** circuit.n_modes > MAX_GRID_POINTS:
            break
        try:
            return _simulate_on(spec, circuit, plan, Delta, delta)
        except AliasingError as exc:
            last = exc
    if last is not None:
        raise last
    raise ValueError(f"grid of {spec.npts}^{circuit.n_modes} points is too large")


def _simulate_on(spec, circuit, plan, Delta, delta):
    if spec.npts ** circuit.n_modes > MAX_GRID_POINTS:
        raise ValueError(f"grid of {spec.npts}^{circuit.n_modes} points is too large")
    js = [circuit.input_index(m) for m in range(circuit.n_modes)]
    st = grid.codeword_state(spec, circuit.d1, js, Delta, delta)
    a1 = plan.alpha1
    for g in circuit.gates:
        if g.kind == "dispq":
            pts = g.amount * plan.A * spec.m
            if pts.denominator != 1:
                raise ValueError("displacement is not a whole number of grid steps")
            st = grid.apply_dispq(st, g.modes[0], int(pts))
        elif g.kind == "dispp":
            t = float(g.amount)
            st = grid.apply_diagonal(st, lambda q, t=t: t * a1 * q, g.modes)
        elif g.kind == "shear":
            st = grid.apply_diagonal(st, lambda q: q * q / 2, g.modes)
        elif g.kind == "shearodd":
            c = float(g.amount) * a1
            st = grid.apply_diagonal(st, lambda q, c=c: (q * q - 2 * c * q) / 2, g.modes)
        elif g.kind == "cz":
            st = grid.apply_diagonal(st, lambda q1, q2: q1 * q2, g.modes)
        elif g.kind == "fourier":
            st = grid.apply_fourier(st, g.modes[0])
        elif g.kind == "homodyne":
            continue
        else:
            raise ValueError(f"grid oracle cannot run {g.describe()}")
    grid.check_aliasing(st)
    return st


def simulate_rsb_fock(circuit: CvCircuit, plan):
    """Run the physical circuit in the Fock basis; returns (state, gadget probabilities)."""
    prim = circuit.primitive
    n_max = fock.default_nmax(prim.alpha)
    if plan.method == "one":
        vecs = [fock.codeword(circuit.d1, circuit.N, circuit.input_index(m), prim, n_max)
                for m in range(circuit.n_modes)]
    else:
        vecs = [fock.codeword(circuit.d1, circuit.N, 0, prim, n_max) for _ in range(circuit.n_modes)]
    st = fock.product_state(vecs)
    gadget_probs = []
    for g in circuit.gates:
        if g.kind == "rot":
            st = fock.apply_rotation(st, g.modes[0], g.params[0])
        elif g.kind == "kerr":
            st = fock.apply_kerr(st, g.modes[0], *g.params)
        elif g.kind == "xkerr":
            st = fock.apply_cross_kerr(st, g.modes[0], g.modes[1], g.params[0])
        elif g.kind == "tfourier":
            st, p = fock.teleported_fourier(st, g.modes[0], plan.d2, plan.M2, prim)
            gadget_probs.append(p)
        elif g.kind == "phasemeas":
            continue
        else:
            raise ValueError(f"Fock oracle cannot run {g.describe()}")
    return st, gadget_probs


def cv_check(compiled, Delta=grid.DEFAULT_DELTA, delta=grid.DEFAULT_DELTA, tol=None) -> dict:
    circuit = compiled.circuit
    if circuit.n_modes > MAX_ORACLE_MODES:
        return {"status": "skipped", "reason": f"oracles handle at most {MAX_ORACLE_MODES} modes"}
    modes = _measured_modes(compiled)
    if modes is None:
        return {"status": "skipped", "reason": "measurements are not all terminal"}
    if not modes:
        return {"status": "skipped", "reason": "no measurements"}
    keys, table = _tableau_joint(compiled)
    if circuit.family == "gkp":
        try:
            st = simulate_gkp_grid(circuit, compiled.plan, Delta, delta)
        except ValueError as exc:
            return {"status": "skipped", "reason": str(exc)}
        dist, outside = grid.homodyne_distribution(st, modes)
        tol = GRID_TOL if tol is None else tol
        dev = _compare(table, dist)
        return {
            "oracle": "grid",
            "status": "ok" if dev <= tol else "mismatch",
            "max_deviation": dev,
            "tolerance": tol,
            "Delta": Delta,
            "delta": delta,
            "outside_bins": outside,
            "distribution": {",".join(map(str, k)): round(v, 9) for k, v in sorted(dist.items()) if v > 1e-9},
        }
    if circuit.primitive.kind != "coherent":
        return {"status": "skipped", "reason": "ideal primitive has no Fock vector"}
    plan = compiled.plan
    st, gprobs = simulate_rsb_fock(circuit, plan)
    dist, outside = fock.phase_measure_joint(st, modes, plan.d2, plan.M2)
    eps = fock.orthogonality_defect(circuit.primitive, plan.d2, plan.M2)
    tol = max(1e-6, 10 * eps) if tol is None else tol
    dev = _compare(table, dist)
    gdev = max((abs(p - 1 / plan.d2) for p in gprobs), default=0.0)
    if tol >= MAX_MEANINGFUL_TOL:
        # codewords this far from orthogonal cannot confirm or refute anything
        status = "inconclusive"
    else:
        status = "ok" if dev <= tol and gdev <= tol else "mismatch"
    return {
        "oracle": "fock",
        "status": status,
        "max_deviation": dev,
        "gadget_probability_deviation": gdev,
        "tolerance": tol,
        "orthogonality_defect": eps,
        "outside_classes": outside,
        "distribution": {",".join(map(str, k)): round(v, 9) for k, v in sorted(dist.items()) if v > 1e-9},
    }


def verify_compiled(compiled, Delta=grid.DEFAULT_DELTA, delta=grid.DEFAULT_DELTA, tol=None) -> dict:
    d = dense_check(compiled)
    c = cv_check(compiled, Delta, delta, tol)
    ok = all(b["status"] != "mismatch" for b in (d, c))
    return {"dense": d, "cv": c, "ok": ok}


def verify(circuit: CvCircuit, method=None, **kw) -> dict:
    compiled = compile_circuit(circuit, method)
    return {
        "schema": SCHEMA,
        "code": code_block(circuit),
        "plan": compiled.plan.as_dict(),
        "tableau": strong_block(compiled),
        "verification": verify_compiled(compiled, **kw),
    }


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def to_text(report: dict) -> str:
    """Human-readable summary of a report."""
    lines = [f"schema: {report['schema']}"]
    plan = report["plan"]
    lines.append("plan: " + ", ".join(f"{k}={v}" for k, v in plan.items()))
    for key in ("strong", "tableau"):
        if key in report:
            blk = report[key]
            for k, dist in blk["marginals"].items():
                parts = []
                for j, p in dist.items():
                    lg = blk["decoded"][k][j]["logical"]
                    parts.append(f"{j}: {p}" + ("" if lg is None else f" (logical {lg})"))
                lines.append(f"{k}: " + ", ".join(parts))
    if "weak" in report:
        blk = report["weak"]
        lines.append(f"shots: {blk['shots']} seed: {blk['seed']}")
        for k, cnt in blk["counts"].items():
            lines.append(f"{k}: " + ", ".join(f"{j}: {c}" for j, c in cnt.items()))
        if "postselection" in blk:
            ps = blk["postselection"]
            lines.append(f"postselection: accepted {ps['accepted']}, aborted {ps['aborted']}")
    for g in report.get("gadgets", []):
        lines.append(f"teleported fourier on mode {g['mode']} (line {g['line']}): success {g['success_probability']}")
    if "verification" in report:
        v = report["verification"]
        for name in ("dense", "cv"):
            b = v[name]
            if b["status"] == "skipped":
                lines.append(f"{name} oracle: skipped ({b['reason']})")
            elif b["status"] == "inconclusive":
                lines.append(
                    f"{name} oracle: inconclusive (orthogonality defect {b['orthogonality_defect']:.3g}; "
                    f"max deviation {b['max_deviation']:.3g})"
                )
            else:
                lines.append(
                    f"{name} oracle: {b['status']} (max deviation {b['max_deviation']:.3g}, tolerance {b['tolerance']:.3g})"
                )
        lines.append("verification: " + ("ok" if v["ok"] else "MISMATCH"))
    if "state" in report:
        lines.append(report["state"].rstrip("\n"))
    return "\n".join(lines) + "\n"

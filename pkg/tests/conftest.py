import numpy as np
import pytest

from cvstab import tableau as tb
from cvstab.oracles import dense
from cvstab.program import CliffordProgram, apply_gate

DIMS = [2, 3, 4, 5, 6, 8, 9, 12]


def random_program(rng, d, n, depth, measure=False):
    """Random Clifford program over F, F^-1, S, SUM, CZ and Paulis."""
    prog = CliffordProgram(d, n)
    ops = ["F", "Finv", "S", "X", "Z"] + (["SUM", "CZ"] if n > 1 else [])
    for _ in range(depth):
        op = ops[rng.integers(len(ops))]
        k = int(rng.integers(n))
        if op == "F":
            prog.fourier(k)
        elif op == "Finv":
            prog.fourier_inverse(k)
        elif op == "S":
            prog.phase(k, power=int(rng.integers(1, 2 * d)))
        elif op in ("X", "Z"):
            getattr(prog, op.lower())(k, power=int(rng.integers(1, d)))
        else:
            c, t = rng.choice(n, size=2, replace=False)
            getattr(prog, op.lower())(int(c), int(t), power=int(rng.integers(1, d)))
    if measure:
        for k in range(n):
            prog.measure(k, key=f"m{k}")
    return prog


def run_tableau(prog, state=None):
    st = tb.new_zero_state(prog.n, prog.d) if state is None else state
    for ins in prog.instructions:
        if ins.op == "M":
            break
        st = apply_gate(st, ins)
    return st


def run_dense(prog, psi=None):
    d, n = prog.d, prog.n
    if psi is None:
        psi = dense.basis_state(d, n, [0] * n)
    for ins in prog.instructions:
        if ins.op == "M":
            break
        psi = dense.apply_op(psi, ins.op, ins.qudits, d, n, ins.power)
    return psi


def tableau_vector(t):
    return dense.stabilizer_vector(t.d, t.n, t.xs, t.zs, t.phases)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])

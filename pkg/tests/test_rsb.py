from fractions import Fraction

import numpy as np
import pytest

from cvstab import tableau as tb
from cvstab.circuit import CvCircuit, Primitive
from cvstab.dsl import parse
from cvstab.errors import MethodTwoInputViolation, NonCliffordGate
from cvstab.oracles import dense, fock
from cvstab.program import outcome_table
from cvstab.rsb import (
    RsbCodewordSpec,
    RsbGate,
    compile_circuit_rsb,
    match_gate,
    method1_identity_check,
    method_one_plan,
    method_two_plan,
    resolve_embedding_rsb,
)

COH4 = Primitive("coherent", 4.0)
F = Fraction


def rsb_circuit(d1, N, gates, n=1, inputs=None, primitive=COH4):
    return CvCircuit("rsb", d1, n, gates, inputs or {}, {}, N=N, primitive=primitive)


def test_plans():
    p = method_one_plan(2, 4, 2)
    assert (p.d2, p.M2, p.z_unit) == (8, 2, F(1, 16))
    assert p.s_params == (F(1, 64), F(0))
    assert p.cz_unit == F(1, 32)
    q = method_two_plan(2, 4, 3)
    assert (q.d2, q.M2, q.beta) == (3, 8, 1)
    with pytest.raises(ValueError):
        method_one_plan(2, 4, 3)


@pytest.mark.parametrize(
    "gate,ops",
    [
        (RsbGate("rot", (0,), (F(1, 16),)), [("Z", (0,), 1)]),
        (RsbGate("rot", (0,), (F(3, 8),)), [("Z", (0,), 6)]),
        (RsbGate("kerr", (0,), (F(1, 64), F(0))), [("S", (0,), 1)]),
        (RsbGate("kerr", (0,), (F(1, 32), F(1, 16))), [("S", (0,), 2), ("Z", (0,), 1)]),
        (RsbGate("xkerr", (0, 1), (F(1, 32),)), [("CZ", (0, 1), 1)]),
        (RsbGate("rot", (0,), (F(1, 32),)), None),
        (RsbGate("kerr", (0,), (F(1, 128), F(0))), None),
    ],
)
def test_match_gate(gate, ops):
    assert match_gate(method_one_plan(2, 4, 2), gate) == ops


@pytest.mark.parametrize(
    "plan,u,v",
    [
        (method_one_plan(2, 4, 2), F(1, 64), F(0)),
        (method_one_plan(2, 2, 1), F(1, 16), F(1, 4)),
        (method_two_plan(2, 2, 3), F(1, 96), F(-1, 24)),
        (method_two_plan(3, 1, 5), F(1, 90), F(-1, 30)),
        (method_two_plan(3, 1, 5), F(1, 45), F(-1, 15)),
    ],
)
def test_kerr_lattice_invariant(plan, u, v):
    """Kerr phases on every Fock level n = M2 (k + d2 s) agree with the tableau gate on k."""
    ops = match_gate(plan, RsbGate("kerr", (0,), (u, v)))
    assert ops is not None
    diag = np.ones(plan.d2, dtype=complex)
    for op, _, power in ops:
        diag = diag * np.diag(dense.gate_matrix(op, plan.d2, power))
    k = np.arange(plan.d2)
    ratios = []
    for s in range(5):
        n = plan.M2 * (k + plan.d2 * s)
        ratios.append(fock.rational_phase(u, n * n) * fock.rational_phase(v, n) / diag)
    ratios = np.concatenate(ratios)
    assert np.allclose(ratios, ratios[0])


def test_method_one_preferred_with_smallest_a():
    c = rsb_circuit(2, 4, [RsbGate("rot", (0,), (F(1, 16),))])
    plan = resolve_embedding_rsb(c)
    assert (plan.method, plan.a, plan.d2) == ("one", 2, 8)


def test_method_two_fallback_and_input_rule():
    gates = [RsbGate("rot", (0,), (F(1, 24),))]
    plan = resolve_embedding_rsb(rsb_circuit(2, 2, gates))
    assert plan.method == "two" and plan.d2 == 6
    with pytest.raises(MethodTwoInputViolation):
        resolve_embedding_rsb(rsb_circuit(2, 2, gates, inputs={0: 1}))


def test_method_hint():
    gates = [RsbGate("rot", (0,), (F(1, 8),))]
    assert resolve_embedding_rsb(rsb_circuit(2, 2, gates), "one").method == "one"
    assert resolve_embedding_rsb(rsb_circuit(2, 2, gates), "two").method == "two"
    with pytest.raises(ValueError):
        resolve_embedding_rsb(rsb_circuit(2, 2, gates), "three")


def test_nonclifford_rejected():
    g = RsbGate("nonclifford", (0,), label="tgate 0 quartic", line=3, reason="quartic")
    with pytest.raises(NonCliffordGate) as exc:
        resolve_embedding_rsb(rsb_circuit(2, 2, [g]))
    assert exc.value.line == 3


def test_method_two_initial_state_is_fourier_zero():
    c = compile_circuit_rsb(rsb_circuit(2, 2, [RsbGate("rot", (0,), (F(1, 24),)), RsbGate("phasemeas", (0,))]))
    assert tb.states_equal(c.initial_state, tb.apply_fourier(tb.new_zero_state(1, 6), 0))
    keys, table = outcome_table(c.program, c.initial_state)
    # a Z rotation does not change the uniform Z-basis distribution
    assert table == {(k,): F(1, 6) for k in range(6)}


def test_tfourier_gadget_metadata():
    c = compile_circuit_rsb(rsb_circuit(2, 2, [RsbGate("tfourier", (0,), line=4)]))
    meta = c.program.instructions[0].meta_dict()
    assert meta["gadget"] == "teleported_fourier"
    assert meta["success_probability"] == F(1, 2)
    assert meta["line"] == 4


def test_cat_circuit_strong_output():
    text = "code rsb d1=2 N=2\ninit 0 0\ntfourier 0\nrot 0 1/4\ntfourier 0\nphasemeas 0\n"
    c = compile_circuit_rsb(parse(text))
    keys, table = outcome_table(c.program, c.initial_state)
    # F Z F |0> = |1> for a qubit (up to phase)
    assert table == {(1,): F(1)}


def test_gate_validation():
    with pytest.raises(TypeError):
        RsbGate("rot", (0,), (0.25,))
    with pytest.raises(ValueError):
        RsbGate("xkerr", (1, 1), (F(1, 8),))


# ----------------------------------------------------------------------
# Fock oracle

@pytest.mark.parametrize("d,M,j", [(2, 1, 0), (2, 2, 1), (3, 2, 2), (8, 2, 4)])
def test_codeword_support_and_norm(d, M, j):
    spec = RsbCodewordSpec(d, M, j, COH4)
    v = spec.fock()
    n_max = v.size - 1
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    nz = np.flatnonzero(np.abs(v) > 0)
    assert set(nz) <= set(spec.support(n_max).tolist())


def test_codewords_orthogonal():
    vs = [fock.codeword(3, 2, j, COH4) for j in range(3)]
    G = np.array([[np.vdot(a, b) for b in vs] for a in vs])
    assert np.allclose(G, np.eye(3))


def test_orthogonality_defect_shrinks_with_amplitude():
    eps = [fock.orthogonality_defect(Primitive("coherent", a), 2, 2) for a in (1.0, 2.0, 4.0)]
    assert eps[0] > eps[1] > eps[2]


def test_truncation_error():
    with pytest.raises(fock.TruncationError):
        fock.primitive_fock(COH4, 10)


def test_ideal_primitive_has_no_fock_vector():
    with pytest.raises(ValueError):
        fock.primitive_fock(Primitive("ideal"), 10)


def test_method1_identity_ideal_normalisation_exact():
    # with the ideal constant the identity is an exact rearrangement of Fock levels
    assert method1_identity_check(2, 4, 2, 0, COH4, normalization="ideal") > 1 - 1e-12


def test_method1_identity_codeword_normalisation_limited_by_defect():
    f = method1_identity_check(2, 4, 2, 0, COH4)
    eps = fock.orthogonality_defect(COH4, 8, 2)
    assert eps > 0.1
    assert f < 0.95
    big = Primitive("coherent", 12.0)
    assert method1_identity_check(2, 4, 2, 0, big) > 1 - 1e-6


@pytest.mark.parametrize("d,M", [(2, 2), (3, 2), (5, 1)])
def test_rotation_is_logical_z(d, M):
    v = fock.codeword(d, M, 1, COH4)
    st = fock.apply_rotation(fock.product_state([v]), 0, F(1, d * M))
    assert np.allclose(st.amps, np.exp(2j * np.pi / d) * v)


@pytest.mark.parametrize("d,M", [(2, 2), (3, 2), (5, 1)])
def test_teleported_fourier_maps_basis_to_xbasis(d, M):
    n_max = fock.default_nmax(4.0)
    eps = fock.orthogonality_defect(COH4, d, M)
    for j in range(d):
        st = fock.product_state([fock.codeword(d, M, j, COH4, n_max)])
        out, p = fock.teleported_fourier(st, 0, d, M, COH4)
        assert abs(p - 1 / d) <= 10 * eps + 1e-9
        assert fock.fidelity(out.amps, fock.xbasis_codeword(d, M, j, COH4, n_max)) > 1 - 1e-6


def test_phase_measure_joint_two_modes():
    v0 = fock.codeword(2, 2, 0, COH4)
    v1 = fock.codeword(2, 2, 1, COH4)
    st = fock.product_state([v0, v1])
    dist, outside = fock.phase_measure_joint(st, [1, 0], 2, 2)
    assert dist[(1, 0)] > 1 - 1e-12
    assert outside < 1e-12

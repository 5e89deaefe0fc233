from fractions import Fraction

import numpy as np
import pytest

from cvstab import tableau as tb
from cvstab.circuit import CvCircuit
from cvstab.dsl import parse
from cvstab.encoding import encode_basis_state
from cvstab.errors import GateNotAdmitted, NonCliffordGate, SqueezingInsufficient
from cvstab.gkp import (
    GkpEmbeddingPlan,
    GkpGate,
    compile_circuit,
    compile_gate,
    cv_phase,
    homodyne_outcome_decode,
    measurement_keys,
    resolve_embedding,
)
from cvstab.oracles import dense, grid
from cvstab.program import outcome_table


def circuit(d1, gates, n=1, inputs=None):
    return CvCircuit("gkp", d1, n, gates, inputs or {})


@pytest.mark.parametrize(
    "d1,gates,A,d2,fix",
    [
        (2, [GkpGate("dispq", (0,), Fraction(1, 2))], 2, 8, False),
        (2, [GkpGate("dispp", (0,), Fraction(1, 3)), GkpGate("dispq", (0,), Fraction(1, 2))], 6, 72, False),
        (2, [GkpGate("shear", (0,))], 1, 2, False),
        (3, [GkpGate("shear", (0,))], 2, 12, True),
        (3, [GkpGate("shearodd", (0,), Fraction(1, 2))], 1, 3, False),
        (3, [GkpGate("fourier", (0,))], 1, 3, False),
    ],
)
def test_resolve_embedding(d1, gates, A, d2, fix):
    plan = resolve_embedding(circuit(d1, gates))
    assert (plan.A, plan.d2, plan.parity_fix) == (A, d2, fix)


def test_nonclifford_gate_rejected_with_line():
    g = GkpGate("nonclifford", (0,), label="tgate 0 quartic", line=7, reason="quartic")
    with pytest.raises(NonCliffordGate) as exc:
        resolve_embedding(circuit(2, [g]))
    assert exc.value.line == 7
    assert "tgate 0 quartic" in str(exc.value)


@pytest.mark.parametrize(
    "gates",
    [
        [GkpGate("shearodd", (0,), Fraction(1, 2))],  # d1 = 2 has no odd embedding
        [GkpGate("shear", (0,)), GkpGate("shearodd", (0,), Fraction(1, 2))],
        [GkpGate("shearodd", (0,), Fraction(1, 3))],
    ],
)
def test_shearodd_rejections(gates):
    with pytest.raises(NonCliffordGate):
        resolve_embedding(circuit(2 if len(gates) == 1 and gates[0].amount == Fraction(1, 2) else 3, gates))


def test_compile_gate_refuses_amount_off_the_grid():
    plan = GkpEmbeddingPlan(2, 2, False)
    with pytest.raises(GateNotAdmitted):
        compile_gate(plan, GkpGate("dispq", (0,), Fraction(1, 3)), 1)
    with pytest.raises(GateNotAdmitted):
        compile_gate(GkpEmbeddingPlan(3, 1, False), GkpGate("shear", (0,)), 1)


@pytest.mark.parametrize(
    "kind,amount,op",
    [("dispq", Fraction(1, 2), "X"), ("dispp", Fraction(-1, 2), "Z"), ("fourier", None, "F"), ("shear", None, "S")],
)
def test_compile_gate_ops(kind, amount, op):
    plan = GkpEmbeddingPlan(2, 2, False)
    prog = compile_gate(plan, GkpGate(kind, (0,), amount), 1)
    assert [ins.op for ins in prog.instructions] == [op]
    if amount is not None:
        assert prog.instructions[0].power == int(amount * plan.A)


def _dense_diag(plan, g):
    prog = compile_gate(plan, g, 1)
    diag = np.ones(plan.d2, dtype=complex)
    for ins in prog.instructions:
        U = dense.gate_matrix(ins.op, plan.d2, ins.power)
        assert np.allclose(U, np.diag(np.diag(U)))
        diag = np.diag(U) * diag
    return diag


@pytest.mark.parametrize(
    "plan,g",
    [
        (GkpEmbeddingPlan(2, 1, False), GkpGate("shear", (0,))),
        (GkpEmbeddingPlan(2, 2, False), GkpGate("shear", (0,))),
        (GkpEmbeddingPlan(3, 2, True), GkpGate("shear", (0,))),
        (GkpEmbeddingPlan(3, 1, False), GkpGate("shearodd", (0,), Fraction(1, 2))),
        (GkpEmbeddingPlan(3, 1, False), GkpGate("shearodd", (0,), Fraction(3, 2))),
        (GkpEmbeddingPlan(5, 3, False), GkpGate("shearodd", (0,), Fraction(1, 6))),
        (GkpEmbeddingPlan(2, 2, False), GkpGate("dispp", (0,), Fraction(1, 2))),
        (GkpEmbeddingPlan(2, 6, False), GkpGate("dispp", (0,), Fraction(-5, 6))),
    ],
)
def test_lattice_phase_invariant(plan, g):
    """The CV phase on every lattice copy of peak n agrees with the tableau gate."""
    diag = _dense_diag(plan, g)
    n = np.arange(plan.d2)
    ratios = []
    for s in range(-2, 3):
        q = plan.alpha2 * (n + plan.d2 * s)
        ratios.append(np.exp(1j * cv_phase(plan, g, q)) / diag)
    ratios = np.concatenate(ratios)
    assert np.allclose(ratios, ratios[0], atol=1e-9)


def test_lattice_phase_invariant_cz():
    plan = GkpEmbeddingPlan(2, 2, False)
    g = GkpGate("cz", (0, 1))
    U = np.diag(dense.cz_gate(plan.d2)).reshape(plan.d2, plan.d2)
    n = np.arange(plan.d2)
    for s1 in range(-2, 3):
        for s2 in range(-2, 3):
            q1 = plan.alpha2 * (n + plan.d2 * s1)
            q2 = plan.alpha2 * (n + plan.d2 * s2)
            ph = np.exp(1j * cv_phase(plan, g, (q1[:, None], q2[None, :])))
            assert np.allclose(ph, U)


def test_half_shift_strong_distribution():
    c = compile_circuit(parse("code gkp d1=2\ninit 0 0\ndispq 0 1/2\nhomodyne 0\n"))
    assert c.plan.d2 == 8
    keys, table = outcome_table(c.program, c.initial_state)
    assert keys == ["q0"]
    assert table == {(1,): Fraction(1, 2), (5,): Fraction(1, 2)}
    for (j,), _ in table.items():
        dec = homodyne_outcome_decode(c.plan, j)
        assert dec.logical is None
        assert dec.d2_index == j


@pytest.mark.parametrize("j", [0, 1])
def test_logical_pauli_circuits(j):
    text = f"code gkp d1=2\ninit 0 {j}\ndispq 0 1\nhomodyne 0\n"
    c = compile_circuit(parse(text))
    keys, table = outcome_table(c.program, c.initial_state)
    assert table == {((j + 1) % 2,): Fraction(1)}
    assert homodyne_outcome_decode(c.plan, (j + 1) % 2).logical == (j + 1) % 2


def test_initial_state_is_encoded_product():
    c = compile_circuit(parse("code gkp d1=2 modes=2\ninit 1 1\ndispq 0 1/2\nhomodyne 0\n"))
    expected = tb.tensor(encode_basis_state(c.plan.params, 0), encode_basis_state(c.plan.params, 1))
    assert tb.states_equal(c.initial_state, expected)


def test_measurement_keys_repeat_suffix():
    gates = [GkpGate("homodyne", (0,)), GkpGate("homodyne", (1,)), GkpGate("homodyne", (0,))]
    assert measurement_keys(gates, "homodyne") == ["q0", "q1", "q0#2"]


def test_gate_validation():
    with pytest.raises(ValueError):
        GkpGate("cz", (0, 0))
    with pytest.raises(TypeError):
        GkpGate("dispq", (0,), 0.5)
    with pytest.raises(ValueError):
        GkpGate("teleport", (0,))


# ----------------------------------------------------------------------
# grid oracle

def test_grid_is_self_dual_and_aligned():
    spec = grid.choose_grid(8)
    assert spec.m % 8 == 0
    assert np.isclose(spec.npts * spec.h ** 2, 2 * np.pi)
    assert spec.h <= grid.DEFAULT_DELTA / 2 + 1e-12


@pytest.mark.parametrize("d1,j", [(2, 0), (2, 1), (3, 2)])
def test_grid_codeword_normalised_and_peaked(d1, j):
    spec = grid.choose_grid(d1)
    st = grid.codeword_state(spec, d1, [j])
    assert abs(st.norm() - 1) < 1e-12
    dist, outside = grid.homodyne_distribution(st, [0])
    assert dist[(j,)] > 1 - 1e-6


def test_grid_fourier_matches_logical_fourier():
    spec = grid.choose_grid(2)
    zero = grid.codeword_state(spec, 2, [0])
    out = grid.apply_fourier(zero, 0)
    dist, _ = grid.homodyne_distribution(out, [0])
    assert abs(dist[(0,)] - 0.5) < 1e-6 and abs(dist[(1,)] - 0.5) < 1e-6
    back = grid.apply_fourier(grid.apply_fourier(out, 0), 0)
    back = grid.apply_fourier(back, 0)
    assert abs(abs(grid.overlap(zero, back)) - 1) < 1e-9


@pytest.mark.parametrize("Delta,delta", [(0.1, 0.15), (0.15, 0.15), (0.1, 0.1)])
@pytest.mark.parametrize("j,phase", [(0, 1), (1, 1j)])
def test_grid_shear_overlap_follows_envelope_formula(Delta, delta, j, phase):
    """Shear on a finite-squeezing codeword: correct logical phase, overlap
    reduced by the envelope to 1/sqrt(1 + Delta^2 / (4 delta^2))."""
    spec = grid.choose_grid(2, Delta, delta)
    st = grid.codeword_state(spec, 2, [j], Delta, delta)
    out = grid.apply_diagonal(st, lambda q: q * q / 2, [0])
    ov = grid.overlap(st, out) / phase
    assert abs(np.angle(ov)) < 0.01
    assert abs(abs(ov) - 1 / np.sqrt(1 + Delta ** 2 / (4 * delta ** 2))) < 1e-3


def test_grid_shear_overlap_improves_with_wider_envelope():
    Delta = 0.1
    vals = []
    for delta in (0.15, 0.25, 0.36):
        spec = grid.choose_grid(2, Delta, delta)
        st = grid.codeword_state(spec, 2, [1], Delta, delta)
        out = grid.apply_diagonal(st, lambda q: q * q / 2, [0])
        vals.append(abs(grid.overlap(st, out)))
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 0.985


def test_grid_integer_shift_is_logical_x():
    spec = grid.choose_grid(2)
    zero = grid.codeword_state(spec, 2, [0])
    one = grid.codeword_state(spec, 2, [1])
    shifted = grid.apply_dispq(zero, 0, spec.m)  # one alpha_2 = alpha_1 step for d2 = 2
    ov = abs(grid.overlap(one, shifted))
    # the envelope stays centred on the origin, so the overlap is just below 1
    assert 0.95 < ov < 1


def test_grid_stabilizer_shift_overlap_follows_envelope_formula():
    """Shifting |0_2> by the stabilizer length L = 2 alpha_1 moves the envelope
    too, so the overlap is exp(-delta^2 L^2 / 4) rather than 1."""
    Delta, delta = 0.1, 0.15
    spec = grid.choose_grid(2, Delta, delta)
    zero = grid.codeword_state(spec, 2, [0], Delta, delta)
    shifted = grid.apply_dispq(zero, 0, 2 * spec.m)
    L = 2 * np.sqrt(np.pi)
    assert abs(abs(grid.overlap(zero, shifted)) - np.exp(-(delta * L) ** 2 / 4)) < 1e-6


def test_homodyne_bins_narrower_than_voronoi_raise():
    spec = grid.choose_grid(2)
    st = grid.codeword_state(spec, 2, [0])
    dist, outside = grid.homodyne_distribution(st, [0], bin_fraction=0.5)
    assert outside < 1e-4
    with pytest.raises(SqueezingInsufficient):
        grid.homodyne_distribution(st, [0], bin_fraction=0.01)


def test_aliasing_detected():
    spec = grid.GridSpec(2, 8)
    st = grid.codeword_state(spec, 2, [0])
    with pytest.raises(grid.AliasingError):
        grid.check_aliasing(st)

import numpy as np
import pytest

from cvstab import wigner as wg


@pytest.fixture(scope="module")
def vacuum():
    q = wg.uniform_grid(8, 0.05)
    psi = wg.vacuum_wavefunction(q)
    return q, psi, wg.wigner_of_wavefunction(psi, q)


def test_vacuum_is_positive_gaussian(vacuum):
    q, psi, g = vacuum
    assert g.W.min() >= -1e-12
    rep = wg.negativity(g)
    assert abs(rep.negative_volume) < 1e-9 and abs(rep.log_negativity) < 1e-9
    Q, P = np.meshgrid(g.q, g.p, indexing="ij")
    assert np.allclose(g.W, np.exp(-Q ** 2 - P ** 2) / np.pi, atol=1e-9)


def test_marginals(vacuum):
    q, psi, g = vacuum
    assert abs(g.integral() - 1) < 1e-6
    assert np.allclose(g.marginal_q(), np.abs(psi) ** 2, atol=1e-9)
    assert np.allclose(g.marginal_p(), wg.momentum_density(psi, q, g.p), atol=1e-3)


def test_fock_wavefunctions_orthonormal():
    q = wg.uniform_grid(10, 0.05)
    H = wg.hermite_functions(6, q)
    assert np.allclose(H @ H.T * 0.05, np.eye(7), atol=1e-9)


@pytest.mark.parametrize("n", [1, 2])
def test_fock_state_negativity(n):
    q = wg.uniform_grid(8, 0.05)
    c = np.zeros(n + 1)
    c[n] = 1
    g = wg.wigner_of_wavefunction(wg.fock_to_wavefunction(c, q), q)
    # W_n(0, 0) = (-1)^n / pi
    i, m = np.argmin(np.abs(g.q)), np.argmin(np.abs(g.p))
    assert abs(g.W[i, m] - (-1) ** n / np.pi) < 1e-6


def test_gkp_codeword_negative_and_sharper_is_more_negative():
    reps = []
    for Delta in (0.2, 0.3):
        q, psi = wg.gkp_codeword_wavefunction(2, 0, Delta)
        reps.append(wg.negativity(wg.wigner_of_wavefunction(psi, q)))
    assert reps[0].min_value < 0 and reps[0].log_negativity > 0
    assert reps[0].log_negativity > reps[1].log_negativity


def test_cat_codeword_negative():
    q, psi = wg.cat_codeword_wavefunction(2.0, 2, 1, 0)
    rep = wg.negativity(wg.wigner_of_wavefunction(psi, q))
    assert rep.min_value < 0 < rep.negative_volume
    assert rep.log_negativity > 0


def test_negativity_stable_under_refinement():
    vals = []
    for h in (0.05, 0.025):
        q = wg.uniform_grid(9, h)
        _, psi = wg.cat_codeword_wavefunction(2.0, 2, 1, 0, q)
        vals.append(wg.negativity(wg.wigner_of_wavefunction(psi, q)).log_negativity)
    assert abs(vals[0] - vals[1]) <= 0.05 * vals[1]


def test_born_rule_cross_check():
    q = wg.uniform_grid(9, 0.05)
    _, a = wg.cat_codeword_wavefunction(2.0, 2, 1, 0, q)
    b = wg.vacuum_wavefunction(q)
    direct = abs(np.vdot(a, b) * 0.05) ** 2
    via = wg.born_overlap(wg.wigner_of_wavefunction(a, q), wg.wigner_of_wavefunction(b, q))
    assert abs(direct - via) < 1e-3


def test_unnormalised_input_rejected():
    q = wg.uniform_grid(5, 0.1)
    with pytest.raises(ValueError):
        wg.wigner_of_wavefunction(2 * wg.vacuum_wavefunction(q), q)


def test_csv_output(vacuum):
    _, _, g = vacuum
    text = wg.to_csv(g, stride=40)
    lines = text.strip().splitlines()
    assert lines[0] == "q,p,W"
    assert len(lines) == 1 + len(range(0, g.q.size, 40)) * len(range(0, g.p.size, 40))

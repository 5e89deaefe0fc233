"""Dense state-vector reference for small qudit registers.

Everything here is built from explicit matrices so it can check the
symbolic tableau rules without sharing any of their arithmetic.
"""

import numpy as np


def omega(d):
    return np.exp(2j * np.pi / d)


def shift(d):
    """X|j> = |j+1 mod d>."""
    return np.roll(np.eye(d), 1, axis=0).astype(complex)


def clock(d):
    """Z|j> = omega^j |j>."""
    return np.diag(omega(d) ** np.arange(d))


def fourier(d):
    """F|j> = sum_k omega^{jk} |k> / sqrt(d)."""
    j = np.arange(d)
    return omega(d) ** np.outer(j, j) / np.sqrt(d)


def phase_gate(d):
    """S_d = diag(omega^{j^2/2} eta^{-j}) read with the half-integer convention.

    Even d: exp(i pi j^2 / d).  Odd d: exp(i pi (j^2 - j) / d).
    """
    j = np.arange(d)
    beta = d % 2
    return np.diag(np.exp(1j * np.pi * (j * j - beta * j) / d))


def sum_gate(d):
    """SUM|i>|j> = |i>|i+j>, qudit order (control, target)."""
    u = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            u[i * d + (i + j) % d, i * d + j] = 1
    return u


def cz_gate(d):
    i = np.arange(d)
    return np.diag((omega(d) ** np.outer(i, i)).reshape(-1))


def embed(op, qudits, n, d):
    """Lift an operator on ``qudits`` (in that order) to the n-qudit space."""
    qudits = list(qudits)
    k = len(qudits)
    rest = [q for q in range(n) if q not in qudits]
    perm = qudits + rest
    full = np.kron(op, np.eye(d ** (n - k)))
    t = full.reshape([d] * (2 * n))
    inv = np.argsort(perm)
    t = t.transpose(list(inv) + [n + p for p in inv])
    return t.reshape(d ** n, d ** n)


def pauli_matrix(d, x, z, phase=0):
    """omega_D^phase * tensor_k X^x_k Z^z_k."""
    D = 2 * d if d % 2 == 0 else d
    X, Z = shift(d), clock(d)
    out = np.array([[1.0 + 0j]])
    for a, b in zip(x, z):
        out = np.kron(out, np.linalg.matrix_power(X, int(a) % d) @ np.linalg.matrix_power(Z, int(b) % d))
    return omega(D) ** phase * out


def basis_state(d, n, digits):
    v = np.zeros(d ** n, dtype=complex)
    idx = 0
    for j in digits:
        idx = idx * d + int(j) % d
    v[idx] = 1
    return v


def stabilizer_vector(d, n, xs, zs, phases, seed=0):
    """State fixed by every generator, found by projecting a random vector.

    Raises ValueError if the generators do not pin down a single state.
    """
    rng = np.random.default_rng(seed)
    v = rng.normal(size=d ** n) + 1j * rng.normal(size=d ** n)
    for x, z, p in zip(xs, zs, phases):
        g = pauli_matrix(d, x, z, p)
        acc = v.copy()
        term = v.copy()
        for _ in range(_operator_order(g) - 1):
            term = g @ term
            acc += term
        v = acc
        nv = np.linalg.norm(v)
        if nv < 1e-9:
            raise ValueError("generators have no common +1 eigenvector")
        v /= nv
    for x, z, p in zip(xs, zs, phases):
        g = pauli_matrix(d, x, z, p)
        if np.linalg.norm(g @ v - v) > 1e-8:
            raise ValueError("projection did not converge to a stabilised state")
    # uniqueness: projector onto the code space has rank 1
    proj = np.eye(d ** n, dtype=complex)
    for x, z, p in zip(xs, zs, phases):
        g = pauli_matrix(d, x, z, p)
        acc = np.zeros_like(proj)
        term = np.eye(d ** n, dtype=complex)
        order = _operator_order(g)
        for _ in range(order):
            acc += term
            term = g @ term
        proj = proj @ (acc / order)
    rank = int(round(np.trace(proj).real))
    if rank != 1:
        raise ValueError(f"stabilised subspace has dimension {rank}, not 1")
    return v


def _operator_order(g, cap=64):
    m = np.eye(g.shape[0], dtype=complex)
    for k in range(1, cap + 1):
        m = g @ m
        if np.allclose(m, np.eye(g.shape[0])):
            return k
    raise ValueError("operator order exceeds cap")


def same_ray(u, v, tol=1e-8):
    """True if u and v agree up to a global phase."""
    return abs(abs(np.vdot(u, v)) - np.linalg.norm(u) * np.linalg.norm(v)) < tol


def marginal_probs(psi, d, n, k):
    p = np.abs(psi.reshape([d] * n)) ** 2
    axes = tuple(a for a in range(n) if a != k)
    return p.sum(axis=axes)


def joint_probs(psi, d, n, ks):
    p = np.abs(psi.reshape([d] * n)) ** 2
    axes = tuple(a for a in range(n) if a not in ks)
    p = p.sum(axis=axes)
    # remaining axes are in ascending qudit order; reorder to ks
    order = sorted(ks)
    return p.transpose([order.index(k) for k in ks])


def project(psi, d, n, k, j):
    """Post-measurement state for outcome j on qudit k (normalised)."""
    t = psi.reshape([d] * n).copy()
    sl = [slice(None)] * n
    for jj in range(d):
        if jj != j:
            sl[k] = jj
            t[tuple(sl)] = 0
    v = t.reshape(-1)
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        raise ValueError("outcome has zero probability")
    return v / nv


def trace_out(psi, d, n, k):
    """Pure state of the other qudits, assuming qudit k is in a product state."""
    t = np.moveaxis(psi.reshape([d] * n), k, 0).reshape(d, -1)
    u, s, vh = np.linalg.svd(t, full_matrices=False)
    if s.size > 1 and s[1] > 1e-8:
        raise ValueError("qudit is entangled")
    return vh[0] * s[0] / abs(s[0])


MAX_DIM = 1 << 20


def gate_matrix(op, d, power=1):
    """Dense matrix for a program gate name (see ``program.GATE_OPS``)."""
    if op == "F":
        return fourier(d)
    if op == "Finv":
        return fourier(d).conj().T
    if op == "S":
        return np.linalg.matrix_power(phase_gate(d), power % (2 * d))
    if op == "Sinv":
        return phase_gate(d).conj().T
    if op == "SUM":
        return np.linalg.matrix_power(sum_gate(d), power % d)
    if op == "CZ":
        return np.linalg.matrix_power(cz_gate(d), power % d)
    if op == "X":
        return np.linalg.matrix_power(shift(d), power % d)
    if op == "Z":
        return np.linalg.matrix_power(clock(d), power % d)
    raise ValueError(f"no dense matrix for {op!r}")


def apply_op(psi, op, qudits, d, n, power=1):
    """Apply a one- or two-qudit gate to a state vector by tensor contraction."""
    u = gate_matrix(op, d, power)
    k = len(qudits)
    t = psi.reshape([d] * n)
    ut = u.reshape([d] * (2 * k))
    t = np.tensordot(ut, t, axes=(list(range(k, 2 * k)), list(qudits)))
    t = np.moveaxis(t, list(range(k)), list(qudits))
    return t.reshape(-1)


def terminal_distribution(program, psi):
    """Joint outcome probabilities for a program whose measurements all come last.

    Returns (measured qudits, probability array with one axis per measurement).
    """
    d, n = program.d, program.n
    if d ** n > MAX_DIM:
        raise ValueError(f"dense register of dimension {d ** n} exceeds {MAX_DIM}")
    ks = []
    for ins in program.instructions:
        if ins.op == "M":
            ks.append(ins.qudits[0])
            continue
        if ks:
            raise ValueError("dense oracle handles terminal measurements only")
        psi = apply_op(psi, ins.op, ins.qudits, d, n, ins.power)
    if not ks:
        return [], np.array(1.0)
    return ks, joint_probs(psi, d, n, ks)

"""Embedding a d1-dimensional logical qudit into a d2 = d1 a^2 qudit.

The logical basis state |j> becomes the uniform superposition

    |j_{d1}> = a^{-1/2} sum_{k<a} |(k d1 + j) a>_{d2}

whose stabilizer group is generated by X^{d1 a} and omega_{d1}^{-j} Z^a.
Logical Paulis are X^a and Z^a; the codespace is fixed by X^{d1 a} and
Z^{d1 a}.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from . import tableau as tb
from .program import CliffordProgram, enumerate_branches
from .tableau import PauliPhaseRing, PauliWord


@dataclass(frozen=True)
class EmbeddingParams:
    d1: int
    a: int = 1

    def __post_init__(self):
        if int(self.d1) != self.d1 or self.d1 < 2:
            raise ValueError(f"logical dimension must be >= 2, got {self.d1}")
        if int(self.a) != self.a or self.a < 1:
            raise ValueError(f"embedding factor must be a positive integer, got {self.a}")

    @property
    def d2(self) -> int:
        return self.d1 * self.a * self.a

    @property
    def ring(self) -> PauliPhaseRing:
        return PauliPhaseRing(self.d2)


@dataclass(frozen=True)
class LogicalPauliMap:
    x_image: PauliWord
    z_image: PauliWord
    codespace_stabilizers: tuple

    def commutation_phase(self) -> int:
        """k with Zbar Xbar = omega_{d2}^k Xbar Zbar; equals d2/d1 for a valid map."""
        return self.z_image.symplectic(self.x_image)


def logical_pauli(p: EmbeddingParams) -> LogicalPauliMap:
    ring = p.ring
    x = PauliWord.single(ring, 1, 0, x=p.a)
    z = PauliWord.single(ring, 1, 0, z=p.a)
    stabs = (
        PauliWord.single(ring, 1, 0, x=p.d1 * p.a),
        PauliWord.single(ring, 1, 0, z=p.d1 * p.a),
    )
    return LogicalPauliMap(x, z, stabs)


def _check_index(p, j):
    if int(j) != j or not 0 <= j < p.d1:
        raise ValueError(f"logical index {j} outside [0, {p.d1})")


def encode_basis_state(p: EmbeddingParams, j: int) -> tb.Tableau:
    """Single-qudit tableau of the encoded basis state |j_{d1}> in d2."""
    _check_index(p, j)
    ring = p.ring
    # omega_{d1}^{-j} = omega_D^{-unit * j * a^2}
    gens = [
        PauliWord.single(ring, 1, 0, x=p.d1 * p.a),
        PauliWord.single(ring, 1, 0, z=p.a, phase=-ring.unit * j * p.a * p.a),
    ]
    return tb.canonicalize(tb.Tableau.from_words(gens))


def encode_product_state(p: EmbeddingParams, js) -> tb.Tableau:
    return tb.tensor(*[encode_basis_state(p, j) for j in js])


def codeword_support(p: EmbeddingParams, j: int):
    """Computational-basis support of |j_{d1}> in d2, sorted."""
    _check_index(p, j)
    return sorted(((k * p.d1 + j) * p.a) % p.d2 for k in range(p.a))


def encoding_isometry(p: EmbeddingParams) -> np.ndarray:
    """d2 x d1 matrix mapping logical amplitudes to d2 amplitudes."""
    v = np.zeros((p.d2, p.d1), dtype=complex)
    for j in range(p.d1):
        v[codeword_support(p, j), j] = 1 / np.sqrt(p.a)
    return v


def stabilizer_of_vector(d: int, amps, tol=1e-9) -> tb.Tableau:
    """Tableau of a single-qudit stabilizer state given by its amplitudes.

    Searches all d^2 Pauli operators X^x Z^z for ones having ``amps`` as
    an eigenvector, and records the eigenvalue as an omega_D phase.  Used
    as a construction path that does not go through the coset formulas.
    """
    ring = PauliPhaseRing(d)
    D = ring.D
    psi = np.asarray(amps, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    idx = np.arange(d)
    gens = []
    for x in range(d):
        for z in range(d):
            # (X^x Z^z psi)[k] = omega^{z (k - x)} psi[k - x]
            out = np.roll(np.exp(2j * np.pi * z * idx / d) * psi, x)
            lam = np.vdot(psi, out)
            if abs(abs(lam) - 1) > tol or np.linalg.norm(out - lam * psi) > tol:
                continue
            p_exp = -np.angle(lam) * D / (2 * np.pi)
            p_int = int(round(p_exp))
            if abs(p_exp - p_int) > 1e-6:
                continue
            gens.append(PauliWord.single(ring, 1, 0, x=x, z=z, phase=p_int))
    t = tb.Tableau.from_words(gens)
    if tb.group_order(t) != d:
        raise ValueError("amplitudes do not describe a stabilizer state")
    return tb.canonicalize(t)


def direct_superposition_state(p: EmbeddingParams, j: int) -> tb.Tableau:
    """Tableau of sum_k |a j + a d1 k>_{d2}, built from its amplitudes."""
    amps = np.zeros(p.d2, dtype=complex)
    for k in range(p.a):
        amps[(p.a * j + p.a * p.d1 * k) % p.d2] = 1
    return stabilizer_of_vector(p.d2, amps)


def coset_state(d: int, offset: int, stride: int) -> tb.Tableau:
    """Uniform superposition over offset + stride Z_d (stride divides d)."""
    if d % stride:
        raise ValueError(f"stride {stride} does not divide {d}")
    ring = PauliPhaseRing(d)
    h = d // stride
    gens = [
        PauliWord.single(ring, 1, 0, x=stride),
        PauliWord.single(ring, 1, 0, z=h, phase=-ring.unit * h * offset),
    ]
    return tb.canonicalize(tb.Tableau.from_words(gens))


def generation_circuit(p: EmbeddingParams) -> CliffordProgram:
    """Two-qudit program preparing |0_{d1}> in qudit 0 of a d2 register.

    F on qudit 0, SUM^a onto qudit 1, measure qudit 1 (outcome m = a t),
    undo the offset with X^{-m/a}, then discard qudit 1.
    """
    prog = CliffordProgram(p.d2, 2)
    prog.fourier(0)
    prog.sum(0, 1, power=p.a)
    prog.measure(1, key="m")
    prog.feedback_x(0, "m", coeff=-1, divisor=p.a)
    prog.discard(1)
    return prog


def generation_branches(p: EmbeddingParams):
    """All branches of the generation circuit: list of (probability, outcome, state)."""
    return [(prob, outs["m"], st) for prob, outs, st in enumerate_branches(generation_circuit(p))]


def logical_value(p: EmbeddingParams, outcome: int):
    """Logical index for a d2 basis outcome, or None outside the code support."""
    outcome %= p.d2
    if outcome % p.a:
        return None
    return (outcome // p.a) % p.d1


def is_codeword_support(p: EmbeddingParams, offset: int, stride: int) -> bool:
    return stride == p.a * p.d1 and offset % p.a == 0 and gcd(stride, p.d2) == stride

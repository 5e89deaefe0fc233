"""Truncated Fock-space reference for rotation-symmetric bosonic codes.

Diagonal gates (rotations, Kerr and cross-Kerr) are applied as exact
per-level phases computed from rational parameters with integer
arithmetic.  Codewords are projections of a primitive onto residue
classes of the photon number.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

import numpy as np
from scipy.special import gammaln

from ..circuit import Primitive
from ..errors import TruncationError

NORM_LOSS_TOL = 1e-8


def default_nmax(alpha: float) -> int:
    a = abs(alpha)
    return int(ceil(a * a + 8 * a + 20))


def primitive_fock(primitive: Primitive, n_max: int) -> np.ndarray:
    """Fock amplitudes of the primitive up to ``n_max`` (coherent states only)."""
    if primitive.kind != "coherent":
        raise ValueError("the ideal primitive has no Fock vector; use a coherent amplitude")
    a = float(primitive.alpha)
    n = np.arange(n_max + 1)
    logc = -a * a / 2 + n * np.log(a) - 0.5 * gammaln(n + 1)
    c = np.exp(logc)
    loss = 1.0 - float(np.sum(c * c))
    if loss > NORM_LOSS_TOL:
        raise TruncationError(f"n_max={n_max} loses {loss:.2e} of the primitive norm")
    return c.astype(complex)


def residue_mask(n_max, modulus, residue):
    n = np.arange(n_max + 1)
    return (n % modulus) == (residue % modulus)


def codeword(d, M, j, primitive, n_max=None, normalization="codeword"):
    """|j_d;M> as a Fock vector.

    ``normalization="codeword"`` gives a unit vector (per-codeword
    constant).  ``"ideal"`` uses the constant dM that holds when the
    rotated primitives are exactly orthogonal; the result is then only
    approximately normalised.
    """
    if n_max is None:
        n_max = default_nmax(primitive.alpha)
    c = primitive_fock(primitive, n_max)
    v = np.where(residue_mask(n_max, d * M, j * M), c, 0)
    if normalization == "codeword":
        nv = np.linalg.norm(v)
        if nv < 1e-300:
            raise TruncationError("codeword has no weight below n_max")
        return v / nv
    if normalization == "ideal":
        return v * np.sqrt(d * M)
    raise ValueError(f"unknown normalization {normalization!r}")


def xbasis_codeword(d, M, k, primitive, n_max=None):
    """|u^k_d;M> = F|k> in primitive-sum form, normalised.

    Equal to (1/sqrt M) sum_l exp(i 2 pi (l d - k) n / (d M)) acting on the
    primitive, i.e. weight exp(2 pi i k n / (d M)) on levels n divisible
    by M.
    """
    if n_max is None:
        n_max = default_nmax(primitive.alpha)
    c = primitive_fock(primitive, n_max)
    n = np.arange(n_max + 1)
    mask = (n % M) == 0
    ph = np.exp(2j * np.pi * ((k * (n // M)) % d) / d)
    v = np.where(mask, c * ph, 0)
    return v / np.linalg.norm(v)


def orthogonality_defect(primitive, d, M, n_max=None) -> float:
    """max over 0<s<dM of |<phi| exp(i 2 pi s n / (dM)) |phi>|."""
    if n_max is None:
        n_max = default_nmax(primitive.alpha)
    p = np.abs(primitive_fock(primitive, n_max)) ** 2
    n = np.arange(n_max + 1)
    L = d * M
    if L < 2:
        return 0.0
    s = np.arange(1, L)[:, None]
    vals = np.abs(np.exp(2j * np.pi * s * n[None, :] / L) @ p)
    return float(vals.max())


def rational_phase(frac: Fraction, values) -> np.ndarray:
    """exp(2 pi i * frac * values) with the fractional part taken exactly."""
    values = np.asarray(values, dtype=np.int64)
    num = (frac.numerator * values) % frac.denominator
    return np.exp(2j * np.pi * num / frac.denominator)


@dataclass
class FockState:
    """Amplitudes with one axis per mode, each of length n_max + 1."""

    amps: np.ndarray

    @property
    def modes(self):
        return self.amps.ndim

    @property
    def n_max(self):
        return self.amps.shape[0] - 1

    def copy(self):
        return FockState(self.amps.copy())

    def norm(self):
        return float(np.linalg.norm(self.amps))


def product_state(vectors) -> FockState:
    amps = vectors[0]
    for v in vectors[1:]:
        amps = np.multiply.outer(amps, v)
    return FockState(np.asarray(amps, dtype=complex))


def _number_grid(state, mode):
    shape = [1] * state.modes
    shape[mode] = state.n_max + 1
    return np.arange(state.n_max + 1).reshape(shape)


def apply_rotation(state: FockState, mode: int, r: Fraction) -> FockState:
    """exp(i 2 pi r n)."""
    n = _number_grid(state, mode)
    return FockState(state.amps * rational_phase(r, n))


def apply_kerr(state: FockState, mode: int, u: Fraction, v: Fraction) -> FockState:
    """exp(i 2 pi (u n^2 + v n))."""
    n = _number_grid(state, mode)
    return FockState(state.amps * rational_phase(u, n * n) * rational_phase(v, n))


def apply_cross_kerr(state: FockState, m1: int, m2: int, w: Fraction) -> FockState:
    """exp(i 2 pi w n_1 n_2)."""
    n1 = _number_grid(state, m1)
    n2 = _number_grid(state, m2)
    return FockState(state.amps * rational_phase(w, n1 * n2))


def phase_measure_distribution(state: FockState, mode: int, d: int, M: int):
    """Probability of each class n = kM (mod dM) on ``mode``, plus the leftover mass.

    The classes stand in for an ideal phase measurement of a d-level code
    with M-fold symmetry; weight on levels not divisible by M is reported
    separately.
    """
    p = np.abs(state.amps) ** 2
    axes = tuple(a for a in range(state.modes) if a != mode)
    pn = p.sum(axis=axes) if axes else p
    total = float(pn.sum())
    n = np.arange(state.n_max + 1)
    probs = {}
    inside = 0.0
    for k in range(d):
        w = float(pn[(n % (d * M)) == k * M].sum())
        probs[k] = w / total
        inside += w
    return probs, 1.0 - inside / total


def project_mode(state: FockState, mode: int, vec: np.ndarray):
    """Contract ``mode`` with <vec|; returns (remaining state, probability)."""
    amps = np.tensordot(vec.conj(), state.amps, axes=([0], [mode]))
    prob = float(np.vdot(amps, amps).real)
    if prob < 1e-300:
        raise ValueError("projection has zero probability")
    return FockState(amps / np.sqrt(prob)), prob


def condition_on_class(state: FockState, mode: int, d: int, M: int, k: int) -> FockState:
    """Collapse ``mode`` onto the class n = kM (mod dM) and renormalise."""
    n = _number_grid(state, mode)
    amps = np.where((n % (d * M)) == k * M, state.amps, 0)
    nv = np.linalg.norm(amps)
    if nv < 1e-300:
        raise ValueError("class has zero probability")
    return FockState(amps / nv)


def teleported_fourier(state: FockState, mode: int, d: int, M: int, primitive: Primitive):
    """Fourier gadget: ancilla |+>, cross-Kerr, project ``mode`` onto |u^0>.

    The output replaces ``mode`` (axes are kept in the original order).
    Returns (new state, success probability).
    """
    n_max = state.n_max
    anc = xbasis_codeword(d, M, 0, primitive, n_max)
    full = FockState(np.multiply.outer(state.amps, anc))
    anc_mode = state.modes
    full = apply_cross_kerr(full, mode, anc_mode, Fraction(1, d * M * M))
    u0 = xbasis_codeword(d, M, 0, primitive, n_max)
    out, prob = project_mode(full, mode, u0)
    # the ancilla axis is now last; move it back to ``mode``
    return FockState(np.moveaxis(out.amps, -1, mode)), prob


def fidelity(u, v) -> float:
    u = np.asarray(u).reshape(-1)
    v = np.asarray(v).reshape(-1)
    return float(abs(np.vdot(u, v)) ** 2 / (np.vdot(u, u).real * np.vdot(v, v).real))


def phase_measure_joint(state: FockState, modes, d: int, M: int):
    """Joint class distribution over ``modes`` ({tuple: probability}) and the
    probability outside every class, before renormalisation."""
    p = np.abs(state.amps) ** 2
    other = tuple(a for a in range(state.modes) if a not in modes)
    if other:
        p = p.sum(axis=other)
    keep = sorted(modes)
    p = np.transpose(p, [keep.index(m) for m in modes])
    total = float(p.sum())
    n = np.arange(state.n_max + 1)
    onehot = np.zeros((n.size, d))
    inside = (n % M) == 0
    onehot[n[inside], (n[inside] // M) % d] = 1
    acc = p
    for ax in range(len(modes)):
        acc = np.moveaxis(np.tensordot(acc, onehot, axes=([ax], [0])), -1, ax)
    binned = float(acc.sum())
    dist = {tuple(int(i) for i in idx): float(acc[idx]) / binned for idx in np.ndindex(*acc.shape)}
    return dist, 1.0 - binned / total

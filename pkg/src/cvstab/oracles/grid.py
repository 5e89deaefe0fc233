"""Finite-squeezing GKP wavefunctions on a position grid.

The grid is self-dual: N h^2 = 2 pi, so the centred discrete Fourier
transform maps position samples to momentum samples on the same points.
The spacing is h = alpha_2 / m with m a multiple of 8, which puts every
peak of the d2 lattice (spacing alpha_2 = sqrt(2 pi / d2)) on a grid
point and makes position shifts by lattice units exact rolls.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, pi, sqrt

import numpy as np

from ..errors import AliasingError, SqueezingInsufficient

DEFAULT_DELTA = 0.15
ALIAS_TOL = 1e-6
EDGE_FRACTION = 0.05


@dataclass(frozen=True)
class GridSpec:
    d2: int
    m: int

    @property
    def alpha2(self):
        return sqrt(2 * pi / self.d2)

    @property
    def h(self):
        return self.alpha2 / self.m

    @property
    def npts(self):
        return self.m * self.m * self.d2

    @property
    def q(self):
        return (np.arange(self.npts) - self.npts // 2) * self.h

    @property
    def extent(self):
        return self.npts * self.h


def choose_grid(d2: int, Delta: float = DEFAULT_DELTA, delta: float = DEFAULT_DELTA, widen: float = 1.0) -> GridSpec:
    """Smallest grid resolving peaks of width ``Delta`` and an envelope of width 1/``delta``.

    Requires h <= min(Delta, delta)/2 and a total extent of at least
    12 / min(Delta, delta), in both position and momentum.  ``widen``
    scales the extent requirement, for circuits whose shears push weight
    to large momenta.
    """
    w = min(Delta, delta)
    alpha2 = sqrt(2 * pi / d2)
    m = 8 * max(1, ceil(alpha2 / (w / 2) / 8))
    while m * sqrt(2 * pi * d2) < widen * 12 / w:
        m += 8
    return GridSpec(d2, m)


@dataclass
class GridState:
    spec: GridSpec
    amps: np.ndarray
    Delta: float
    delta: float

    @property
    def modes(self):
        return self.amps.ndim

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2) * self.spec.h ** self.modes))

    def copy(self):
        return GridState(self.spec, self.amps.copy(), self.Delta, self.delta)


def gkp_wavefunction(spec: GridSpec, d1: int, j: int, Delta=DEFAULT_DELTA, delta=DEFAULT_DELTA):
    """Normalised |j_{d1}> with Gaussian peaks of width Delta under a 1/delta envelope.

    Peaks sit at q_s = alpha_1 (j + d1 s) with amplitude exp(-delta^2 q_s^2 / 2).
    """
    q = spec.q
    alpha1 = sqrt(2 * pi / d1)
    smax = int(ceil((abs(q[0]) + 10 * Delta) / (alpha1 * d1))) + 1
    psi = np.zeros_like(q)
    for s in range(-smax, smax + 1):
        qs = alpha1 * (j + d1 * s)
        psi += np.exp(-(delta * qs) ** 2 / 2) * np.exp(-((q - qs) ** 2) / (2 * Delta ** 2))
    psi = psi.astype(complex)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * spec.h)
    return psi


def product_state(spec, vectors, Delta=DEFAULT_DELTA, delta=DEFAULT_DELTA) -> GridState:
    amps = vectors[0]
    for v in vectors[1:]:
        amps = np.multiply.outer(amps, v)
    return GridState(spec, np.asarray(amps, dtype=complex), Delta, delta)


def codeword_state(spec, d1, js, Delta=DEFAULT_DELTA, delta=DEFAULT_DELTA) -> GridState:
    return product_state(spec, [gkp_wavefunction(spec, d1, j, Delta, delta) for j in js], Delta, delta)


def centred_dft(psi, axis=0, inverse=False):
    """Unitary transform psi'(x) = (2 pi)^{-1/2} int e^{+i x y} psi(y) dy on the grid
    (``inverse`` flips the sign of the exponent)."""
    n = psi.shape[axis]
    shifted = np.fft.ifftshift(psi, axes=axis)
    if inverse:
        out = np.fft.fft(shifted, axis=axis) / np.sqrt(n)
    else:
        out = np.fft.ifft(shifted, axis=axis) * np.sqrt(n)
    return np.fft.fftshift(out, axes=axis)


def _broadcast_q(state, mode):
    shape = [1] * state.modes
    shape[mode] = state.spec.npts
    return state.spec.q.reshape(shape)


def check_aliasing(state: GridState, tol=ALIAS_TOL):
    """Raise AliasingError if more than ``tol`` probability sits near any grid edge,
    in position or in momentum."""
    edge = max(1, int(EDGE_FRACTION * state.spec.npts))
    for mode in range(state.modes):
        for amps in (state.amps, centred_dft(state.amps, axis=mode)):
            p = np.abs(np.moveaxis(amps, mode, 0)) ** 2
            total = p.sum()
            outer = p[:edge].sum() + p[-edge:].sum()
            if outer > tol * total:
                raise AliasingError(f"{outer / total:.2e} of the weight lies at the grid edge on mode {mode}")


def apply_dispq(state: GridState, mode: int, shift_points: int) -> GridState:
    """Position shift by ``shift_points`` grid steps: psi(q) -> psi(q - shift)."""
    return GridState(state.spec, np.roll(state.amps, shift_points, axis=mode), state.Delta, state.delta)


def apply_diagonal(state: GridState, phase_fn, modes) -> GridState:
    qs = [_broadcast_q(state, m) for m in modes]
    return GridState(state.spec, state.amps * np.exp(1j * phase_fn(*qs)), state.Delta, state.delta)


def apply_fourier(state: GridState, mode: int) -> GridState:
    """exp(i pi (p^2 + q^2) / 4): psi'(x) = (2 pi)^{-1/2} int e^{ixy} psi(y) dy."""
    return GridState(state.spec, centred_dft(state.amps, axis=mode), state.Delta, state.delta)


def overlap(a: GridState, b: GridState) -> complex:
    return complex(np.vdot(a.amps, b.amps) * a.spec.h ** a.modes)


def homodyne_distribution(state: GridState, modes, bin_fraction=1.0, max_outside=0.1):
    """Joint distribution of peak classes on ``modes``.

    A sample at q belongs to class round(q / alpha_2) mod d2 when it lies
    within ``bin_fraction * alpha_2 / 2`` of that peak.  Returns
    ({class tuple: probability}, outside mass); probabilities are
    renormalised over the binned mass.
    """
    spec = state.spec
    q = spec.q
    k = np.rint(q / spec.alpha2).astype(np.int64)
    inside = np.abs(q - k * spec.alpha2) <= bin_fraction * spec.alpha2 / 2 + 1e-12
    cls = np.where(inside, k % spec.d2, -1)
    p = np.abs(state.amps) ** 2 * spec.h ** state.modes
    other = tuple(a for a in range(state.modes) if a not in modes)
    if other:
        p = p.sum(axis=other)
    total = float(p.sum())
    # order axes as requested
    keep = sorted(modes)
    p = np.transpose(p, [keep.index(m) for m in modes])
    hist = np.zeros((spec.d2,) * len(modes))
    labels = [cls] * len(modes)
    # accumulate by class along each axis in turn
    acc = p
    for ax, lab in enumerate(labels):
        sel = lab >= 0
        acc = np.take(acc, np.flatnonzero(sel), axis=ax)
        onehot = np.zeros((sel.sum(), spec.d2))
        onehot[np.arange(sel.sum()), lab[sel]] = 1
        acc = np.moveaxis(np.tensordot(acc, onehot, axes=([ax], [0])), -1, ax)
    hist = acc
    binned = float(hist.sum())
    outside = 1.0 - binned / total
    if outside > max_outside:
        raise SqueezingInsufficient(f"{outside:.3f} of the probability falls outside the homodyne bins")
    dist = {}
    for idx in np.ndindex(*hist.shape):
        dist[tuple(int(i) for i in idx)] = float(hist[idx]) / binned
    return dist, outside

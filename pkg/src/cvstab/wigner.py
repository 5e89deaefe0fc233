"""Single-mode Wigner functions and negativity measures on a grid.

For a pure state sampled at q_i = q_0 + i h the Wigner function

    W(q, p) = (1/pi) int psi*(q + y) psi(q - y) e^{2 i p y} dy

is evaluated at y = k h for every available lag k and transformed with an
FFT, giving momenta p_m = pi m / (K h).  With this sampling the position
marginal equals |psi(q_i)|^2 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .circuit import Primitive
from .oracles import fock, grid


@dataclass
class PhaseSpaceGrid:
    q: np.ndarray
    p: np.ndarray
    W: np.ndarray  # shape (len(q), len(p))

    @property
    def dq(self):
        return float(self.q[1] - self.q[0])

    @property
    def dp(self):
        return float(self.p[1] - self.p[0])

    def integral(self, values=None):
        v = self.W if values is None else values
        return float(v.sum() * self.dq * self.dp)

    def marginal_q(self):
        return self.W.sum(axis=1) * self.dp

    def marginal_p(self):
        return self.W.sum(axis=0) * self.dq


@dataclass(frozen=True)
class NegativityReport:
    min_value: float
    negative_volume: float
    log_negativity: float

    def as_dict(self):
        return {
            "min_value": self.min_value,
            "negative_volume": self.negative_volume,
            "log_negativity": self.log_negativity,
        }


def wigner_of_wavefunction(psi, q, chunk=256) -> PhaseSpaceGrid:
    """Wigner function of the sampled pure state ``psi`` on the uniform grid ``q``."""
    psi = np.asarray(psi, dtype=complex)
    q = np.asarray(q, dtype=float)
    n = psi.size
    h = float(q[1] - q[0])
    norm = float(np.sum(np.abs(psi) ** 2) * h)
    if abs(norm - 1) > 1e-6:
        raise ValueError(f"wavefunction norm {norm:.6f} is not 1")
    K = n if n % 2 == 0 else n + 1
    lags = np.arange(-K // 2, K // 2)
    W = np.empty((n, K))
    for start in range(0, n, chunk):
        rows = np.arange(start, min(n, start + chunk))
        plus = rows[:, None] + lags[None, :]
        minus = rows[:, None] - lags[None, :]
        ok = (plus >= 0) & (plus < n) & (minus >= 0) & (minus < n)
        c = np.where(ok, np.conj(psi[np.clip(plus, 0, n - 1)]) * psi[np.clip(minus, 0, n - 1)], 0)
        # sum_k c_k exp(2 pi i m k / K) with k running over ``lags``
        spec = np.fft.ifft(np.fft.ifftshift(c, axes=1), axis=1) * K
        W[rows] = (h / pi) * np.fft.fftshift(spec, axes=1).real
    p = pi * np.arange(-K // 2, K // 2) / (K * h)
    return PhaseSpaceGrid(q, p, W)


def negativity(g: PhaseSpaceGrid, tol=1e-3) -> NegativityReport:
    total = g.integral()
    if abs(total - 1) > tol:
        raise ValueError(f"Wigner function integrates to {total:.6f}, not 1")
    absint = g.integral(np.abs(g.W))
    return NegativityReport(float(g.W.min()), (absint - 1) / 2, float(np.log(absint)))


def born_overlap(g1: PhaseSpaceGrid, g2: PhaseSpaceGrid) -> float:
    """|<psi1|psi2>|^2 from 2 pi int W1 W2 (both on the same grid)."""
    if g1.W.shape != g2.W.shape:
        raise ValueError("Wigner grids differ")
    return 2 * pi * g1.integral(g1.W * g2.W)


def momentum_density(psi, q, p):
    """|psi~(p)|^2 with psi~(p) = (2 pi)^{-1/2} int e^{-ipq} psi(q) dq."""
    h = float(q[1] - q[0])
    amp = np.exp(-1j * np.outer(p, q)) @ psi * h / np.sqrt(2 * pi)
    return np.abs(amp) ** 2


# ----------------------------------------------------------------------
# test states

def uniform_grid(half_width, h):
    n = int(round(2 * half_width / h))
    n += n % 2
    return (np.arange(n) - n // 2) * h


def vacuum_wavefunction(q):
    return (pi ** -0.25 * np.exp(-np.asarray(q) ** 2 / 2)).astype(complex)


def hermite_functions(n_max, q):
    """Rows phi_0..phi_{n_max}(q) of the harmonic-oscillator eigenfunctions."""
    q = np.asarray(q, dtype=float)
    out = np.zeros((n_max + 1, q.size))
    out[0] = pi ** -0.25 * np.exp(-q * q / 2)
    if n_max >= 1:
        out[1] = np.sqrt(2) * q * out[0]
    for n in range(1, n_max):
        out[n + 1] = np.sqrt(2 / (n + 1)) * q * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def fock_to_wavefunction(coeffs, q):
    coeffs = np.asarray(coeffs, dtype=complex)
    psi = coeffs @ hermite_functions(coeffs.size - 1, q)
    h = float(q[1] - q[0])
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * h)


def cat_codeword_wavefunction(alpha, d=2, M=1, j=0, q=None):
    """Position wavefunction of |j_d;M> with a coherent primitive."""
    if q is None:
        q = uniform_grid(abs(alpha) * 1.5 + 8, 0.05)
    c = fock.codeword(d, M, j, Primitive("coherent", float(alpha)))
    return q, fock_to_wavefunction(c, q)


def gkp_codeword_wavefunction(d=2, j=0, Delta=0.2, delta=None):
    """Finite-squeezing GKP |j_d> on a self-dual grid; returns (q, psi)."""
    delta = Delta if delta is None else delta
    spec = grid.choose_grid(d, Delta, delta)
    return spec.q, grid.gkp_wavefunction(spec, d, j, Delta, delta)


def to_csv(g: PhaseSpaceGrid, stride=1) -> str:
    """Long-format CSV with columns q,p,W (optionally decimated)."""
    lines = ["q,p,W"]
    for i in range(0, g.q.size, stride):
        for m in range(0, g.p.size, stride):
            lines.append(f"{g.q[i]:.6g},{g.p[m]:.6g},{g.W[i, m]:.6e}")
    return "\n".join(lines) + "\n"

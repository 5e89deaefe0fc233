"""Stabilizer tableaux for n qudits of any dimension d >= 2.

A tableau stores generators of a stabilizer group as rows ``(x | z)`` over
Z_d together with a phase exponent over Z_D, where D = d for odd d and
D = 2d for even d.  Row ``(x, z, p)`` stands for the operator

    omega_D**p * prod_k X_k**x_k Z_k**z_k

with the X part written to the left of the Z part.  Composite d is handled
by treating the rows as a Z_d-module and reducing it to Howell form; this
is also why a tableau may carry up to 2n generators (the d=8 state
(|0> + |4>)/sqrt(2) needs both X^4 and Z^2).

Gate functions never mutate their argument; they return a new tableau.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

import numpy as np

from .errors import ContradictionError, NotProductError, RingMismatchError
from .zmod import unit_normalizer, xgcd


# storage dtype for tableau entries; products of two entries must fit
_DT = np.int32
MAX_DIMENSION = 1 << 15


@dataclass(frozen=True)
class PauliPhaseRing:
    """Dimension ``d`` together with the phase modulus ``D``."""

    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"qudit dimension must be an integer >= 2, got {self.d}")
        if self.d > MAX_DIMENSION:
            raise ValueError(f"qudit dimension {self.d} exceeds the supported {MAX_DIMENSION}")

    @property
    def D(self) -> int:
        return 2 * self.d if self.d % 2 == 0 else self.d

    @property
    def unit(self) -> int:
        """Exponent of omega_D equal to omega_d (2 for even d, 1 for odd d)."""
        return self.D // self.d

    @property
    def beta(self) -> int:
        return self.d % 2

    @property
    def eta(self) -> complex:
        """eta_d = omega_D / omega_2d, the phase-gate unit."""
        return complex(np.exp(2j * np.pi / self.D - 1j * np.pi / self.d))

    @property
    def phase_gate_shift(self) -> int:
        """omega_D exponent in S X S^dag = omega_D**s * X Z."""
        return self.unit - 1


@dataclass(frozen=True)
class PauliWord:
    """omega_D**phase * prod_k X_k**x[k] Z_k**z[k]."""

    ring: PauliPhaseRing
    x: tuple
    z: tuple
    phase: int = 0

    def __post_init__(self):
        d = self.ring.d
        if len(self.x) != len(self.z):
            raise ValueError("x and z exponent vectors differ in length")
        object.__setattr__(self, "x", tuple(int(v) % d for v in self.x))
        object.__setattr__(self, "z", tuple(int(v) % d for v in self.z))
        object.__setattr__(self, "phase", int(self.phase) % self.ring.D)

    @classmethod
    def single(cls, ring, n, k, x=0, z=0, phase=0):
        xs = [0] * n
        zs = [0] * n
        xs[k] = x
        zs[k] = z
        return cls(ring, tuple(xs), tuple(zs), phase)

    @classmethod
    def identity(cls, ring, n):
        return cls(ring, (0,) * n, (0,) * n, 0)

    @property
    def n(self) -> int:
        return len(self.x)

    def _check(self, other):
        if self.ring != other.ring or self.n != other.n:
            raise RingMismatchError("Pauli words over different (n, d)")

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        self._check(other)
        f = self.ring.unit
        cross = sum(a * b for a, b in zip(self.z, other.x))
        return PauliWord(
            self.ring,
            tuple(a + b for a, b in zip(self.x, other.x)),
            tuple(a + b for a, b in zip(self.z, other.z)),
            self.phase + other.phase + f * (cross % self.ring.d),
        )

    def __pow__(self, m: int) -> "PauliWord":
        if m < 0:
            raise ValueError("use a non-negative power")
        f, d = self.ring.unit, self.ring.d
        xz = sum(a * b for a, b in zip(self.x, self.z)) % d
        tri = (m * (m - 1) // 2) % d
        return PauliWord(
            self.ring,
            tuple(m * a for a in self.x),
            tuple(m * b for b in self.z),
            self.phase * m + f * ((xz * tri) % d),
        )

    def symplectic(self, other: "PauliWord") -> int:
        """k such that self * other = omega_d**k * other * self."""
        self._check(other)
        d = self.ring.d
        return (
            sum(a * b for a, b in zip(self.z, other.x))
            - sum(a * b for a, b in zip(self.x, other.z))
        ) % d

    def commutes_with(self, other: "PauliWord") -> bool:
        return self.symplectic(other) == 0

    def is_identity(self) -> bool:
        return not any(self.x) and not any(self.z)

    def __str__(self):
        parts = []
        for k, (a, b) in enumerate(zip(self.x, self.z)):
            if a:
                parts.append(f"X{k}^{a}")
            if b:
                parts.append(f"Z{k}^{b}")
        body = " ".join(parts) if parts else "I"
        return f"w{self.ring.D}^{self.phase} {body}"


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of a computational-basis measurement of one qudit.

    The outcomes with nonzero probability form the coset
    ``offset + stride * Z_d``; each has probability ``stride / d``.
    """

    qudit: int
    outcome: int
    offset: int
    stride: int
    probability: Fraction

    @property
    def count(self) -> int:
        return self.probability.denominator // self.probability.numerator

    @property
    def support(self):
        return [self.offset + t * self.stride for t in range(self.count)]


class Tableau:
    """Generator matrix over Z_d plus phase vector over Z_D.

    ``xs`` and ``zs`` have shape (m, n); ``phases`` has shape (m,).
    Arrays are read-only; every operation returns a new tableau.
    """

    __slots__ = ("ring", "n", "xs", "zs", "phases", "canonical")

    def __init__(self, ring, n, xs, zs, phases, canonical=False):
        if isinstance(ring, int):
            ring = PauliPhaseRing(ring)
        self.ring = ring
        self.n = int(n)
        d, D = ring.d, ring.D
        xs = np.asfortranarray(np.array(xs, dtype=np.int64).reshape(-1, self.n) % d, dtype=_DT)
        zs = np.asfortranarray(np.array(zs, dtype=np.int64).reshape(-1, self.n) % d, dtype=_DT)
        phases = (np.array(phases, dtype=np.int64).reshape(-1) % D).astype(_DT)
        if not (xs.shape == zs.shape and xs.shape[0] == phases.shape[0]):
            raise ValueError("inconsistent generator array shapes")
        for arr in (xs, zs, phases):
            arr.flags.writeable = False
        self.xs, self.zs, self.phases = xs, zs, phases
        self.canonical = canonical

    @property
    def d(self) -> int:
        return self.ring.d

    @property
    def num_generators(self) -> int:
        return self.xs.shape[0]

    @property
    def generators(self):
        return [
            PauliWord(self.ring, tuple(x), tuple(z), p)
            for x, z, p in zip(self.xs.tolist(), self.zs.tolist(), self.phases.tolist())
        ]

    @classmethod
    def from_words(cls, words, n=None, d=None):
        words = list(words)
        if not words:
            if n is None or d is None:
                raise ValueError("need n and d for an empty generator list")
            ring = PauliPhaseRing(d)
            return cls(ring, n, np.zeros((0, n)), np.zeros((0, n)), np.zeros(0))
        ring = words[0].ring
        n = words[0].n
        for w in words:
            words[0]._check(w)
        return cls(
            ring,
            n,
            [w.x for w in words],
            [w.z for w in words],
            [w.phase for w in words],
        )

    def _mutable(self):
        # column-major copies: gate kernels gather whole qudit columns
        return self.xs.copy(order="F"), self.zs.copy(order="F"), self.phases.copy()

    def _replace(self, xs, zs, phases, canonical=False):
        # arrays coming from the gate kernels are already reduced
        out = object.__new__(Tableau)
        for arr in (xs, zs, phases):
            arr.flags.writeable = False
        out.ring, out.n = self.ring, self.n
        out.xs, out.zs, out.phases = xs, zs, phases
        out.canonical = canonical
        return out

    def __repr__(self):
        return f"Tableau(d={self.d}, n={self.n}, generators={self.num_generators})"

    def __str__(self):
        return to_text(self)


# ----------------------------------------------------------------------
# construction

def new_zero_state(n: int, d: int) -> Tableau:
    """|0...0> of n qudits, stabilised by Z on every qudit."""
    if int(n) != n or n < 1:
        raise ValueError(f"need at least one qudit, got n={n}")
    ring = PauliPhaseRing(d)
    eye = np.eye(n, dtype=np.int64)
    return Tableau(ring, n, np.zeros((n, n)), eye, np.zeros(n), canonical=True)


def tensor(*tabs: Tableau) -> Tableau:
    """Product state of several tableaux over the same d."""
    ring = tabs[0].ring
    if any(t.ring != ring for t in tabs):
        raise RingMismatchError("tensor product needs a common dimension")
    n = sum(t.n for t in tabs)
    m = sum(t.num_generators for t in tabs)
    xs = np.zeros((m, n), dtype=np.int64)
    zs = np.zeros((m, n), dtype=np.int64)
    ph = np.zeros(m, dtype=np.int64)
    r = c = 0
    for t in tabs:
        k = t.num_generators
        xs[r:r + k, c:c + t.n] = t.xs
        zs[r:r + k, c:c + t.n] = t.zs
        ph[r:r + k] = t.phases
        r += k
        c += t.n
    return Tableau(ring, n, xs, zs, ph)


# ----------------------------------------------------------------------
# in-place gate kernels; ``k`` may be an int or an index array

def _fourier(ring, xs, zs, ph, k):
    d, f = ring.d, ring.unit
    x = xs[:, k].copy()
    z = zs[:, k]
    # X^x Z^z -> Z^x X^-z = omega_d^{-xz} X^-z Z^x
    ph -= f * ((x * z).sum(axis=1) % d)
    xs[:, k] = (-z) % d
    zs[:, k] = x
    ph %= ring.D


def _fourier_inv(ring, xs, zs, ph, k):
    d, f = ring.d, ring.unit
    x = xs[:, k].copy()
    z = zs[:, k].copy()
    # X^x Z^z -> Z^-x X^z = omega_d^{-xz} X^z Z^-x
    ph -= f * ((x * z).sum(axis=1) % d)
    xs[:, k] = z
    zs[:, k] = (-x) % d
    ph %= ring.D


def _phase(ring, xs, zs, ph, k):
    d, f, s = ring.d, ring.unit, ring.phase_gate_shift
    x = xs[:, k]
    tri = (x * (x - 1) // 2) % d
    ph += (s * x + f * tri).sum(axis=1)
    zs[:, k] = (zs[:, k] + x) % d
    ph %= ring.D


def _phase_inv(ring, xs, zs, ph, k):
    d, f, s = ring.d, ring.unit, ring.phase_gate_shift
    x = xs[:, k]
    tri = (x * (x - 1) // 2) % d
    ph -= (s * x + f * tri).sum(axis=1)
    zs[:, k] = (zs[:, k] - x) % d
    ph %= ring.D


def _sum(ring, xs, zs, ph, c, t, power=1):
    d = ring.d
    xs[:, t] = (xs[:, t] + power * xs[:, c]) % d
    zs[:, c] = (zs[:, c] - power * zs[:, t]) % d


def _cz(ring, xs, zs, ph, c, t, power=1):
    d, f = ring.d, ring.unit
    xc = xs[:, c]
    xt = xs[:, t]
    ph += f * ((power * xc * xt).sum(axis=1) % d)
    zs[:, c] = (zs[:, c] + power * xt) % d
    zs[:, t] = (zs[:, t] + power * xc) % d
    ph %= ring.D


def _pauli(ring, xs, zs, ph, a, b):
    d, f = ring.d, ring.unit
    # (X^a Z^b) W (X^a Z^b)^dag = omega_d^{b.x - a.z} W
    ph += f * ((xs @ b - zs @ a) % d)
    ph %= ring.D


def _index(t, k):
    arr = np.atleast_1d(np.asarray(k, dtype=np.int64))
    if arr.size and (arr.min() < 0 or arr.max() >= t.n):
        raise IndexError(f"qudit index out of range for n={t.n}: {k}")
    if len(set(arr.tolist())) != arr.size:
        raise ValueError(f"repeated qudit index in {k}")
    return arr


def _pair_index(t, c, tgt):
    c = _index(t, c)
    tgt = _index(t, tgt)
    if c.size != tgt.size:
        raise ValueError("control and target lists differ in length")
    if set(c.tolist()) & set(tgt.tolist()):
        raise ValueError("control and target qudits must differ")
    return c, tgt


# ----------------------------------------------------------------------
# public gates

def apply_fourier(t: Tableau, k) -> Tableau:
    """F_d on qudit(s) k: X -> Z, Z -> X^-1."""
    k = _index(t, k)
    xs, zs, ph = t._mutable()
    _fourier(t.ring, xs, zs, ph, k)
    return t._replace(xs, zs, ph)


def apply_fourier_inverse(t: Tableau, k) -> Tableau:
    k = _index(t, k)
    xs, zs, ph = t._mutable()
    _fourier_inv(t.ring, xs, zs, ph, k)
    return t._replace(xs, zs, ph)


def apply_phase_gate(t: Tableau, k) -> Tableau:
    """S_d = sum_j omega_d^{j^2/2} eta_d^{-j} |j><j| on qudit(s) k."""
    k = _index(t, k)
    xs, zs, ph = t._mutable()
    _phase(t.ring, xs, zs, ph, k)
    return t._replace(xs, zs, ph)


def apply_phase_gate_inverse(t: Tableau, k) -> Tableau:
    k = _index(t, k)
    xs, zs, ph = t._mutable()
    _phase_inv(t.ring, xs, zs, ph, k)
    return t._replace(xs, zs, ph)


def apply_sum(t: Tableau, control, target, power: int = 1) -> Tableau:
    """SUM |i>|j> = |i>|i+j>, optionally raised to ``power``."""
    c, tg = _pair_index(t, control, target)
    xs, zs, ph = t._mutable()
    _sum(t.ring, xs, zs, ph, c, tg, power)
    return t._replace(xs, zs, ph)


def apply_cz(t: Tableau, control, target, power: int = 1) -> Tableau:
    """CZ |i>|j> = omega_d^{ij} |i>|j>, optionally raised to ``power``."""
    c, tg = _pair_index(t, control, target)
    xs, zs, ph = t._mutable()
    _cz(t.ring, xs, zs, ph, c, tg, power)
    return t._replace(xs, zs, ph)


def apply_pauli(t: Tableau, word: PauliWord) -> Tableau:
    """Conjugate by a Pauli word; only generator phases change."""
    if word.ring != t.ring or word.n != t.n:
        raise RingMismatchError("Pauli word and tableau differ in (n, d)")
    xs, zs, ph = t._mutable()
    a = np.array(word.x, dtype=_DT)
    b = np.array(word.z, dtype=_DT)
    _pauli(t.ring, xs, zs, ph, a, b)
    return t._replace(xs, zs, ph, canonical=t.canonical)


def apply_x(t: Tableau, k: int, power: int = 1) -> Tableau:
    return apply_pauli(t, PauliWord.single(t.ring, t.n, k, x=power))


def apply_z(t: Tableau, k: int, power: int = 1) -> Tableau:
    return apply_pauli(t, PauliWord.single(t.ring, t.n, k, z=power))


# ----------------------------------------------------------------------
# module reduction

class _Rows:
    """Working copy of generator rows ``V = [x | z]`` used during reduction."""

    def __init__(self, ring, n, xs, zs, ph):
        self.ring = ring
        self.n = n
        self.V = np.concatenate([xs, zs], axis=1).astype(np.int64)
        self.P = np.array(ph, dtype=np.int64)

    def power_of(self, r, mult):
        """Rows ``V[r]**mult`` for a vector of multipliers; returns (V, P)."""
        d, f, D, n = self.ring.d, self.ring.unit, self.ring.D, self.n
        v = self.V[r]
        xz = int(v[:n] @ v[n:]) % d
        mult = np.asarray(mult, dtype=np.int64) % d
        tri = (mult * (mult - 1) // 2) % d
        pv = np.multiply.outer(mult, v) % d
        pp = (self.P[r] * mult + f * ((xz * tri) % d)) % D
        return pv, pp

    def raise_row(self, r, u):
        pv, pp = self.power_of(r, np.array([u]))
        self.V[r] = pv[0]
        self.P[r] = pp[0]

    def absorb(self, targets, r, mult):
        """V[targets] <- V[targets] * V[r]**mult (elementwise)."""
        d, f, D, n = self.ring.d, self.ring.unit, self.ring.D, self.n
        mult = np.asarray(mult, dtype=np.int64) % d
        pv, pp = self.power_of(r, mult)
        zt = self.V[targets, n:]
        cross = (zt @ self.V[r, :n]) % d
        self.P[targets] = (self.P[targets] + pp + f * ((mult * cross) % d)) % D
        self.V[targets] = (self.V[targets] + pv) % d

    def product(self, v1, p1, v2, p2):
        d, f, D, n = self.ring.d, self.ring.unit, self.ring.D, self.n
        cross = int(v1[n:] @ v2[:n]) % d
        return (v1 + v2) % d, (p1 + p2 + f * cross) % D

    def combine(self, r, i, c):
        """Unimodular 2x2 step leaving gcd at (r, c) and zero at (i, c)."""
        d = self.ring.d
        a, b = int(self.V[r, c]), int(self.V[i, c])
        g, s, t = xgcd(a, b)
        vr1, pr1 = self.power_of(r, np.array([s % d]))
        vi1, pi1 = self.power_of(i, np.array([t % d]))
        vr2, pr2 = self.power_of(r, np.array([(-b // g) % d]))
        vi2, pi2 = self.power_of(i, np.array([(a // g) % d]))
        nv_r, np_r = self.product(vr1[0], pr1[0], vi1[0], pi1[0])
        nv_i, np_i = self.product(vr2[0], pr2[0], vi2[0], pi2[0])
        self.V[r], self.P[r] = nv_r, np_r
        self.V[i], self.P[i] = nv_i, np_i

    def swap(self, a, b):
        self.V[[a, b]] = self.V[[b, a]]
        self.P[[a, b]] = self.P[[b, a]]

    def append(self, v, p):
        self.V = np.vstack([self.V, v[None, :]])
        self.P = np.append(self.P, p)

    def howell(self, order, reduce_above=True):
        """Bring rows to Howell form for the column ``order``.

        Pivots are divisors of d; with ``reduce_above`` the entries above a
        pivot lie in [0, pivot).  Returns the list of (column, pivot) pairs,
        one per surviving row, and truncates the rows to those.
        """
        d = self.ring.d
        r = 0
        pivots = []
        for c in order:
            if r >= self.V.shape[0]:
                break
            nz = np.flatnonzero(self.V[r:, c])
            if nz.size == 0:
                continue
            nz += r
            gs = np.gcd(self.V[nz, c], d)
            best = int(nz[np.argmin(gs)])
            if best != r:
                self.swap(r, best)
            while True:
                g, u = unit_normalizer(int(self.V[r, c]), d)
                if u != 1:
                    self.raise_row(r, u)
                below = r + 1 + np.flatnonzero(self.V[r + 1:, c])
                if below.size == 0:
                    break
                vals = self.V[below, c]
                ok = vals % g == 0
                if ok.any():
                    self.absorb(below[ok], r, -(vals[ok] // g))
                bad = below[~ok]
                if bad.size == 0:
                    break
                self.combine(r, int(bad[0]), c)
            if reduce_above and r > 0:
                q = self.V[:r, c] // g
                sel = np.flatnonzero(q)
                if sel.size:
                    self.absorb(sel, r, -q[sel])
            if g != 1:
                pv, pp = self.power_of(r, np.array([d // g]))
                if pv[0].any() or pp[0]:
                    self.append(pv[0], pp[0])
            pivots.append((c, g))
            r += 1
        if np.any(self.V[r:]):  # pragma: no cover - guarded by full column order
            raise RuntimeError("reduction left nonzero rows")
        if np.any(self.P[r:]):
            raise ContradictionError("stabilizer group contains a nontrivial multiple of I")
        self.V = self.V[:r]
        self.P = self.P[:r]
        return pivots

    def split(self):
        n = self.n
        return self.V[:, :n], self.V[:, n:], self.P


def _rows(t: Tableau) -> _Rows:
    return _Rows(t.ring, t.n, t.xs, t.zs, t.phases)


def canonicalize(t: Tableau) -> Tableau:
    """Unique generator set: Howell form over columns x_0..x_{n-1}, z_0..z_{n-1}."""
    if t.canonical:
        return t
    rows = _rows(t)
    rows.howell(range(2 * t.n))
    xs, zs, ph = rows.split()
    return Tableau(t.ring, t.n, xs, zs, ph, canonical=True)


def group_order(t: Tableau) -> int:
    """Number of elements in the group generated by the tableau rows."""
    c = canonicalize(t)
    rows = _rows(c)
    piv = rows.howell(range(2 * t.n))
    return reduce(lambda acc, cg: acc * (t.d // cg[1]), piv, 1)


def is_valid_state(t: Tableau) -> bool:
    """True when the rows commute and generate d**n elements without -I."""
    words = t.generators
    for i, a in enumerate(words):
        for b in words[i + 1:]:
            if not a.commutes_with(b):
                return False
    try:
        return group_order(t) == t.d ** t.n
    except ContradictionError:
        return False


def states_equal(t1: Tableau, t2: Tableau) -> bool:
    """True iff both tableaux stabilise the same state (group equality with phases)."""
    if t1.ring != t2.ring or t1.n != t2.n:
        raise RingMismatchError("cannot compare tableaux over different (n, d)")
    a, b = canonicalize(t1), canonicalize(t2)
    return (
        a.xs.shape == b.xs.shape
        and np.array_equal(a.xs, b.xs)
        and np.array_equal(a.zs, b.zs)
        and np.array_equal(a.phases, b.phases)
    )


def group_elements(t: Tableau):
    """Enumerate every group element as a PauliWord.  Exponential; for tests."""
    seen = {}
    ident = PauliWord.identity(t.ring, t.n)
    frontier = [ident]
    seen[(ident.x, ident.z)] = ident
    gens = t.generators
    while frontier:
        nxt = []
        for w in frontier:
            for g in gens:
                p = w * g
                key = (p.x, p.z)
                if key in seen:
                    if seen[key].phase != p.phase:
                        raise ContradictionError("group contains a phase multiple of I")
                    continue
                seen[key] = p
                nxt.append(p)
        frontier = nxt
    return list(seen.values())


# ----------------------------------------------------------------------
# measurement

def _measure_order(n, ks):
    kset = set(ks)
    rest = [j for j in range(n) if j not in kset]
    order = list(ks) + rest + [n + j for j in rest] + [n + k for k in reversed(ks)]
    return order


@dataclass
class CosetDistribution:
    """Exact joint distribution of measuring qudits ``ks`` in the Z basis.

    The support is an affine coset in Z_d^|ks|; every supported outcome has
    probability ``1 / support_size``.  Outcomes are resolved one qudit at a
    time: qudit ``ks[i]`` obeys ``pivot * j = rhs(previous outcomes)``.
    """

    ring: PauliPhaseRing
    ks: list
    steps: list  # per qudit: None or (pivot, phase, {earlier index: coeff})
    strides: list  # marginal stride per qudit
    offsets: list  # marginal offset per qudit

    @property
    def d(self):
        return self.ring.d

    @property
    def support_size(self) -> int:
        size = 1
        for st in self.steps:
            size *= self.d if st is None else st[0]
        return size

    def _rhs(self, i, outcomes):
        d, f = self.d, self.ring.unit
        pivot, phase, coeffs = self.steps[i]
        acc = -(phase // f)
        for l, c in coeffs.items():
            acc -= c * outcomes[l]
        return pivot, acc % d

    def conditional(self, i, outcomes):
        """(offset, stride) for qudit ``ks[i]`` given earlier outcomes."""
        d = self.d
        if self.steps[i] is None:
            return 0, 1
        pivot, rhs = self._rhs(i, outcomes)
        if rhs % pivot:
            raise ContradictionError("inconsistent stabilizer phases")  # pragma: no cover
        stride = d // pivot
        return (rhs // pivot) % stride, stride

    def probability(self, outcome) -> Fraction:
        outcome = [int(v) % self.d for v in outcome]
        for i in range(len(self.ks)):
            j0, stride = self.conditional(i, outcome)
            if (outcome[i] - j0) % stride:
                return Fraction(0)
        return Fraction(1, self.support_size)

    def marginal(self, k) -> dict:
        i = self.ks.index(k)
        stride = self.strides[i]
        p = Fraction(stride, self.d)
        return {self.offsets[i] + t * stride: p for t in range(self.d // stride)}

    def enumerate(self, limit=1 << 16) -> dict:
        if self.support_size > limit:
            raise ValueError(f"support of size {self.support_size} exceeds limit {limit}")
        p = Fraction(1, self.support_size)
        out = [[]]
        for i in range(len(self.ks)):
            nxt = []
            for prefix in out:
                j0, stride = self.conditional(i, prefix)
                for t in range(self.d // stride):
                    nxt.append(prefix + [j0 + t * stride])
            out = nxt
        return {tuple(o): p for o in out}

    def sample(self, rng, shots=1):
        """Array of shape (shots, len(ks)) drawn from the distribution."""
        d, f = self.d, self.ring.unit
        res = np.zeros((shots, len(self.ks)), dtype=np.int64)
        for i, st in enumerate(self.steps):
            if st is None:
                res[:, i] = rng.integers(0, d, size=shots)
                continue
            pivot, phase, coeffs = st
            rhs = np.full(shots, -(phase // f), dtype=np.int64)
            for l, c in coeffs.items():
                rhs -= c * res[:, l]
            rhs %= d
            stride = d // pivot
            j0 = (rhs // pivot) % stride
            res[:, i] = j0 + stride * rng.integers(0, pivot, size=shots)
        return res


def _reduce_for_measurement(t: Tableau, ks):
    n = t.n
    rows = _rows(t)
    order = _measure_order(n, ks)
    pivots = rows.howell(order, reduce_above=False)
    return rows, order, pivots


def _distribution_from_rows(t, ks, rows, order, pivots):
    d, n = t.d, t.n
    zcol = {n + k: i for i, k in enumerate(ks)}
    steps = [None] * len(ks)
    for r, (c, g) in enumerate(pivots):
        if c in zcol:
            i = zcol[c]
            coeffs = {}
            for cc, l in zcol.items():
                if l < i and rows.V[r, cc]:
                    coeffs[l] = int(rows.V[r, cc])
            steps[i] = (int(g), int(rows.P[r]), coeffs)
    strides = [gcd(*t.xs[:, k].tolist(), d) for k in ks]
    dist = CosetDistribution(t.ring, list(ks), steps, strides, [0] * len(ks))
    # particular solution gives the marginal offsets
    sol = []
    for i in range(len(ks)):
        j0, _ = dist.conditional(i, sol)
        sol.append(j0)
    dist.offsets = [sol[i] % strides[i] for i in range(len(ks))]
    return dist


def outcome_distribution(t: Tableau, ks) -> CosetDistribution:
    """Strong simulation: exact joint distribution of Z measurements on ``ks``."""
    ks = [int(k) for k in np.atleast_1d(ks)]
    _index(t, ks)
    rows, order, pivots = _reduce_for_measurement(t, ks)
    return _distribution_from_rows(t, ks, rows, order, pivots)


def measure_many(t: Tableau, ks, rng=None, forced=None):
    """Measure qudits ``ks`` in order; returns (post-state, list of records).

    ``forced`` optionally fixes the outcomes; an outcome outside the
    support raises ContradictionError.
    """
    ks = [int(k) for k in np.atleast_1d(ks)]
    _index(t, ks)
    d, n, f = t.d, t.n, t.ring.unit
    rows, order, pivots = _reduce_for_measurement(t, ks)
    dist = _distribution_from_rows(t, ks, rows, order, pivots)
    if forced is not None:
        forced = [int(v) for v in np.atleast_1d(forced)]
        if len(forced) != len(ks):
            raise ValueError("one forced outcome per measured qudit")
    elif rng is None:
        rng = np.random.default_rng()
    outcomes = []
    records = []
    for i, k in enumerate(ks):
        j0, stride = dist.conditional(i, outcomes)
        count = d // stride
        if forced is not None:
            j = forced[i] % d
            if (j - j0) % stride:
                raise ContradictionError(
                    f"forced outcome {forced[i]} on qudit {k} outside support {j0} + {stride}Z_{d}"
                )
        else:
            j = j0 + stride * int(rng.integers(0, count))
        outcomes.append(j)
        records.append(MeasurementRecord(k, j, j0, stride, Fraction(stride, d)))

    # post-measurement group: elements commuting with every measured Z, plus pins
    keep = [r for r, (c, _) in enumerate(pivots) if c >= n or c not in set(ks)]
    xs = rows.V[keep, :n]
    zs = rows.V[keep, n:]
    ph = rows.P[keep]
    pin_z = np.zeros((len(ks), n), dtype=np.int64)
    pin_p = np.zeros(len(ks), dtype=np.int64)
    for i, k in enumerate(ks):
        pin_z[i, k] = 1
        pin_p[i] = -f * outcomes[i]
    if len(ks) == n:
        order_z = np.zeros((n, n), dtype=np.int64)
        order_p = np.zeros(n, dtype=np.int64)
        for i, k in enumerate(ks):
            order_z[k, k] = 1
            order_p[k] = pin_p[i]
        post = Tableau(t.ring, n, np.zeros((n, n)), order_z, order_p, canonical=True)
    else:
        post = canonicalize(
            Tableau(
                t.ring,
                n,
                np.vstack([xs, np.zeros_like(pin_z)]),
                np.vstack([zs, pin_z]),
                np.concatenate([ph, pin_p]),
            )
        )
    return post, records


def measure_z(t: Tableau, k: int, rng=None, forced=None):
    """Measure one qudit in the computational basis."""
    post, recs = measure_many(t, [k], rng=rng, forced=None if forced is None else [forced])
    return post, recs[0]


def discard(t: Tableau, k: int) -> Tableau:
    """Trace out qudit ``k``; it must be in a product state with the rest."""
    _index(t, k)
    n = t.n
    rows = _rows(t)
    rest = [j for j in range(n) if j != k]
    order = [k, n + k] + rest + [n + j for j in rest]
    pivots = rows.howell(order, reduce_above=False)
    keep = [r for r, (c, _) in enumerate(pivots) if c not in (k, n + k)]
    size = 1
    for r in keep:
        size *= t.d // pivots[r][1]
    if size != t.d ** (n - 1):
        raise NotProductError(f"qudit {k} is entangled with the rest of the register")
    cols = [j for j in range(n) if j != k]
    xs = rows.V[keep][:, cols]
    zs = rows.V[keep][:, [n + j for j in cols]]
    return canonicalize(Tableau(t.ring, n - 1, xs, zs, rows.P[keep]))


# ----------------------------------------------------------------------
# text serialisation

def to_text(t: Tableau) -> str:
    lines = [f"tableau d={t.d} n={t.n}"]
    for x, z, p in zip(t.xs.tolist(), t.zs.tolist(), t.phases.tolist()):
        lines.append(f"{p} | {' '.join(map(str, x))} | {' '.join(map(str, z))}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Tableau:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "tableau":
        raise ValueError("missing 'tableau' header")
    kv = dict(item.split("=") for item in head[1:])
    d, n = int(kv["d"]), int(kv["n"])
    xs, zs, ph = [], [], []
    for ln in lines[1:]:
        p, x, z = (part.split() for part in ln.split("|"))
        if len(x) != n or len(z) != n:
            raise ValueError(f"generator row has wrong length: {ln!r}")
        ph.append(int(p[0]))
        xs.append([int(v) for v in x])
        zs.append([int(v) for v in z])
    return Tableau(PauliPhaseRing(d), n, np.array(xs).reshape(-1, n), np.array(zs).reshape(-1, n), ph)

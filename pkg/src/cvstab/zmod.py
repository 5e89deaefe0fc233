"""Small helpers for arithmetic in Z_d with d composite."""

from math import gcd


def xgcd(a, b):
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    r0, r1 = a, b
    s0, s1 = 1, 0
    t0, t1 = 0, 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0 < 0:
        r0, s0, t0 = -r0, -s0, -t0
    return r0, s0, t0


def unit_normalizer(a, d):
    """Return ``(g, u)`` with ``u`` a unit mod ``d`` and ``a*u % d == g``.

    ``g = gcd(a, d)`` is the canonical associate of ``a`` in Z_d.
    """
    a %= d
    if a == 0:
        return 0, 1
    g = gcd(a, d)
    dp = d // g
    if dp == 1:
        return g % d, 1
    u0 = pow(a // g, -1, dp)
    # lift u0 (a unit mod d/g) to a unit mod d
    for k in range(g):
        u = u0 + k * dp
        if gcd(u, d) == 1:
            return g, u
    raise ArithmeticError(f"no unit lift for {a} mod {d}")  # pragma: no cover


def divisors(n):
    out = [k for k in range(1, int(n**0.5) + 1) if n % k == 0]
    return sorted(set(out + [n // k for k in out]))

"""Bernoulli numbers B_2..B_(p-3) modulo p, by two independent routes.

``recurrence``: sum_{j=0}^{n} C(n+1, j) B_j = 0 over F_p, O(p^2) but
vectorised row by row.  Valid because no denominator of B_j (j <= p-3) is
divisible by p.

``voronoi``: Voronoi's congruence with a primitive root g,

    (g^n - 1) B_n ≡ n g^(n-1) sum_{j=1}^{p-1} j^(n-1) floor(j g / p)  (mod p),

and the sums for all n at once.  Writing j = g^i turns them into
S(t) = sum_i f_i g^(i t); the identity i t = C(i+t, 2) - C(i, 2) - C(t, 2)
turns that into one correlation, done exactly by Kronecker substitution
through a single big-integer product.
"""

from __future__ import annotations

import gmpy2
import numpy as np
from sympy import primitive_root

METHODS = ("recurrence", "voronoi")

# the convolution packs sums of p values below p^2 into 64-bit slots
VORONOI_MAX_P = 2_000_000


def bernoulli_mod_p(p: int, method: str = "recurrence") -> dict[int, int]:
    """Map 2t -> B_2t mod p for 2 <= 2t <= p - 3 (empty for p < 5)."""
    if p < 5:
        return {}
    if method == "recurrence":
        return _recurrence(p)
    if method == "voronoi":
        return _voronoi(p)
    raise ValueError(f"unknown Bernoulli method {method!r}; choose from {METHODS}")


def irregular_indices(p: int, method: str = "recurrence") -> list[int]:
    """Even 2t in [2, p-3] with p | B_2t."""
    return sorted(n for n, b in bernoulli_mod_p(p, method).items() if b == 0)


def _recurrence(p: int) -> dict[int, int]:
    top = p - 3
    B = np.zeros(top + 1, dtype=np.int64)
    B[0] = 1
    B[1] = (p - 1) // 2  # -1/2 mod p
    row = np.array([1, 2, 1], dtype=np.int64)  # C(2, j)
    out = {}
    for n in range(2, top + 1):
        nxt = np.empty(n + 2, dtype=np.int64)
        nxt[0] = 1
        nxt[-1] = 1
        np.add(row[1:], row[:-1], out=nxt[1:-1])
        nxt[1:-1] %= p
        row = nxt  # C(n+1, j), j = 0..n+1
        if n % 2:
            continue
        s = int(np.dot(row[:n], B[:n]) % p)
        b = (-s * pow(n + 1, -1, p)) % p
        B[n] = b
        out[n] = b
    return out


def _powers(g: int, count: int, p: int) -> np.ndarray:
    """g^e mod p for e = 0..count-1, by doubling blocks."""
    out = np.empty(count, dtype=np.int64)
    out[0] = 1
    filled = 1
    while filled < count:
        step = min(filled, count - filled)
        factor = pow(g, filled, p)
        out[filled:filled + step] = out[:step] * factor % p
        filled += step
    return out


def _kronecker_correlate(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Exact full convolution of two non-negative int64 arrays (results < 2^64)."""
    a = gmpy2.mpz(int.from_bytes(u.astype("<u8").tobytes(), "little"))
    b = gmpy2.mpz(int.from_bytes(v.astype("<u8").tobytes(), "little"))
    size = len(u) + len(v)
    raw = int(a * b).to_bytes(8 * size, "little")
    return np.frombuffer(raw, dtype="<u8")[:size - 1]


def _voronoi(p: int) -> dict[int, int]:
    if p > VORONOI_MAX_P:
        raise ValueError(f"voronoi method supports p <= {VORONOI_MAX_P}")
    L = p - 1
    g = primitive_root(p)
    gpow = _powers(g, L, p)
    i = np.arange(L, dtype=np.int64)
    f = gpow * g // p  # floor(j g / p) with j = g^i
    tri_i = (i * (i - 1) // 2) % L
    u = f * gpow[(-tri_i) % L] % p
    l = np.arange(2 * L - 1, dtype=np.int64)
    v = gpow[(l * (l - 1) // 2) % L]
    conv = _kronecker_correlate(u[::-1].copy(), v)
    # R(t) = sum_i u_i v_(i+t) sits at index L-1+t
    n = np.arange(2, p - 2, 2, dtype=np.int64)
    t = n - 1
    R = (conv[L - 1 + t] % np.uint64(p)).astype(np.int64)
    S = R * gpow[(-(t * (t - 1) // 2)) % L] % p
    gn1 = gpow[t % L]
    denom = (gn1 * g - 1) % p
    vals = n * gn1 % p * S % p * _inverse_mod(denom, p) % p
    return dict(zip(n.tolist(), vals.tolist()))


def _inverse_mod(x: np.ndarray, p: int) -> np.ndarray:
    """Elementwise x^(p-2) mod p (p < 2^31, entries nonzero)."""
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result

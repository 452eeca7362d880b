"""Fixed-precision arithmetic over Z/p^N: scalars, square matrices, valuations.

Precision never grows implicitly.  Anything that would need to divide by p
(and therefore lose a digit) raises :class:`PrecisionError` instead of
silently returning a lower-precision answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from sympy import isprime

from .errors import ContextMismatchError, NotInvertibleError, PrecisionError

INF = math.inf


def val_p(n: int, p: int) -> int | float:
    """Exponent of ``p`` in ``n``; ``INF`` for ``n == 0``."""
    if p < 2:
        raise ValueError(f"val_p needs a prime base, got {p}")
    if n == 0:
        return INF
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def val_p_factorial(n: int, p: int) -> int:
    """Legendre's formula for v_p(n!)."""
    total = 0
    q = p
    while q <= n:
        total += n // q
        q *= p
    return total


@dataclass(frozen=True)
class PadicContext:
    p: int
    N: int
    modulus: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.p, int) or not isprime(self.p):
            raise ValueError(f"p={self.p!r} is not prime")
        if self.N < 1:
            raise ValueError(f"precision N must be >= 1, got {self.N}")
        object.__setattr__(self, "modulus", self.p ** self.N)

    @property
    def epsilon(self) -> int:
        return 1 if self.p == 2 else 0

    def scalar(self, value: int) -> "PadicScalar":
        return PadicScalar(self, value)

    def with_precision(self, N: int) -> "PadicContext":
        return PadicContext(self.p, N)


def epsilon(p: int) -> int:
    return 1 if p == 2 else 0


@dataclass(frozen=True)
class PadicScalar:
    ctx: PadicContext
    residue: int

    def __post_init__(self):
        object.__setattr__(self, "residue", self.residue % self.ctx.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, PadicScalar):
            if other.ctx != self.ctx:
                raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")
            return other.residue
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.ctx, self.residue + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.ctx, self.residue - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.ctx, o - self.residue)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.ctx, self.residue * o)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicScalar(self.ctx, -self.residue)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PadicScalar(self.ctx, pow(self.residue, e, self.ctx.modulus))

    def valuation(self) -> int:
        """v_p of the residue, capped at N (zero reports N)."""
        if self.residue == 0:
            return self.ctx.N
        return val_p(self.residue, self.ctx.p)

    def is_unit(self) -> bool:
        return self.residue % self.ctx.p != 0

    def inverse(self) -> "PadicScalar":
        if not self.is_unit():
            raise NotInvertibleError(f"{self.residue} is not a unit mod {self.ctx.p}")
        return PadicScalar(self.ctx, pow(self.residue, -1, self.ctx.modulus))

    def __truediv__(self, other):
        o = other if isinstance(other, PadicScalar) else PadicScalar(self.ctx, other)
        if not o.is_unit():
            raise PrecisionError("division by a non-unit would lose precision")
        return self * o.inverse()

    def __int__(self):
        return self.residue


# Flat row-major helpers.  Group enumeration calls these directly on tuples.

def mul_flat(a: Sequence[int], b: Sequence[int], m: int, q: int) -> tuple[int, ...]:
    out = []
    for i in range(m):
        row = a[i * m:(i + 1) * m]
        for j in range(m):
            s = 0
            for k in range(m):
                s += row[k] * b[k * m + j]
            out.append(s % q)
    return tuple(out)


def identity_flat(m: int) -> tuple[int, ...]:
    return tuple(1 if i == j else 0 for i in range(m) for j in range(m))


def det_int(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse_flat(a: Sequence[int], m: int, p: int, q: int) -> tuple[int, ...]:
    """Gauss-Jordan inverse over Z/q, q a power of p; pivots must be units."""
    aug = [list(a[i * m:(i + 1) * m]) + [1 if i == j else 0 for j in range(m)] for i in range(m)]
    for col in range(m):
        piv = next((r for r in range(col, m) if aug[r][col] % p), None)
        if piv is None:
            raise NotInvertibleError("matrix is not invertible at p")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, q)
        aug[col] = [(x * inv) % q for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % q for x, y in zip(aug[r], aug[col])]
    return tuple(x for row in aug for x in row[m:])


@dataclass(frozen=True)
class PadicMatrix:
    """Square matrix over Z/p^N, stored as a row-major tuple of residues."""

    ctx: PadicContext
    m: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("matrix dimension must be >= 1")
        if len(self.entries) != self.m * self.m:
            raise ValueError(f"expected {self.m * self.m} entries, got {len(self.entries)}")
        q = self.ctx.modulus
        object.__setattr__(self, "entries", tuple(int(x) % q for x in self.entries))

    @classmethod
    def from_rows(cls, ctx: PadicContext, rows: Iterable[Iterable[int]]) -> "PadicMatrix":
        rows = [list(r) for r in rows]
        m = len(rows)
        if any(len(r) != m for r in rows):
            raise ValueError("matrix must be square")
        return cls(ctx, m, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, ctx: PadicContext, m: int) -> "PadicMatrix":
        return cls(ctx, m, identity_flat(m))

    @classmethod
    def diagonal(cls, ctx: PadicContext, diag: Sequence[int]) -> "PadicMatrix":
        m = len(diag)
        return cls(ctx, m, tuple(diag[i] if i == j else 0 for i in range(m) for j in range(m)))

    def rows(self) -> list[list[int]]:
        m = self.m
        return [list(self.entries[i * m:(i + 1) * m]) for i in range(m)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.m + j]

    def _check(self, other: "PadicMatrix"):
        if not isinstance(other, PadicMatrix):
            raise TypeError(f"expected PadicMatrix, got {type(other).__name__}")
        if other.ctx != self.ctx or other.m != self.m:
            raise ContextMismatchError(
                f"cannot combine {self.m}x{self.m} over {self.ctx} with {other.m}x{other.m} over {other.ctx}")

    def __matmul__(self, other: "PadicMatrix") -> "PadicMatrix":
        self._check(other)
        return PadicMatrix(self.ctx, self.m, mul_flat(self.entries, other.entries, self.m, self.ctx.modulus))

    def __add__(self, other: "PadicMatrix") -> "PadicMatrix":
        self._check(other)
        return PadicMatrix(self.ctx, self.m, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "PadicMatrix") -> "PadicMatrix":
        self._check(other)
        return PadicMatrix(self.ctx, self.m, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return PadicMatrix(self.ctx, self.m, tuple(-a for a in self.entries))

    def scale(self, c: int) -> "PadicMatrix":
        return PadicMatrix(self.ctx, self.m, tuple(c * a for a in self.entries))

    def __pow__(self, e: int) -> "PadicMatrix":
        if e < 0:
            return self.inverse() ** (-e)
        result = PadicMatrix.identity(self.ctx, self.m)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def det(self) -> PadicScalar:
        return PadicScalar(self.ctx, det_int(self.rows()))

    def inverse(self) -> "PadicMatrix":
        return mat_inverse(self)

    def is_identity(self) -> bool:
        return self.entries == identity_flat(self.m)

    def congruent_to_identity(self, k: int) -> bool:
        """True iff self ≡ I mod p^k (k is clipped to the context precision)."""
        k = min(k, self.ctx.N)
        pk = self.ctx.p ** k
        return all((a - b) % pk == 0 for a, b in zip(self.entries, identity_flat(self.m)))

    def reduce(self, N: int) -> "PadicMatrix":
        """Image under Z/p^N' -> Z/p^N for N <= current precision."""
        if N > self.ctx.N:
            raise PrecisionError(f"cannot raise precision from {self.ctx.N} to {N}")
        return PadicMatrix(self.ctx.with_precision(N), self.m, self.entries)


def mat_mul(a: PadicMatrix, b: PadicMatrix) -> PadicMatrix:
    return a @ b


def mat_inverse(a: PadicMatrix) -> PadicMatrix:
    if det_int(a.rows()) % a.ctx.p == 0:
        raise NotInvertibleError("determinant is not a unit: matrix not invertible at p")
    return PadicMatrix(a.ctx, a.m, inverse_flat(a.entries, a.m, a.ctx.p, a.ctx.modulus))

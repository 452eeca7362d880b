"""The powerful Z_p-Lie algebras gl_m and sl_m inside M_m(Q_p).

gl_m is the Z_p-lattice spanned by E_ij(p) = p^(1+eps) E_ij.  Elements are
kept as exact integer matrices; nothing here reduces modulo p^N.

Valuation convention: ``w_valuation(E_ij(p)) == 0``.  The group-side
filtration starts at level 1 (G_1 = Sl_m^(1) = exp(sl_m)), so an algebra
element of valuation w exponentiates into filtration level w + 1.  Example:
the standard generators have w = 0 and exp(z) sits in level 1 but not 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .errors import ClosureError, ContextMismatchError, NormalizationError
from .padic import INF, PadicContext, PadicMatrix, epsilon, val_p

Matrix = tuple[tuple[int, ...], ...]


def _as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in r) for r in rows)


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    m = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(m)) for j in range(m))
        for i in range(m))


@dataclass(frozen=True)
class LieElement:
    """An element of gl_m: integer matrix with all entries divisible by p^(1+eps)."""

    m: int
    p: int
    mat: Matrix

    def __post_init__(self):
        mat = _as_matrix(self.mat)
        if len(mat) != self.m or any(len(r) != self.m for r in mat):
            raise ValueError(f"expected a {self.m}x{self.m} matrix")
        scale = self.p ** (1 + epsilon(self.p))
        if any(x % scale for r in mat for x in r):
            raise ValueError(f"entries must be divisible by p^(1+eps) = {scale} to lie in gl_m")
        object.__setattr__(self, "mat", mat)

    @classmethod
    def zero(cls, m: int, p: int) -> "LieElement":
        return cls(m, p, tuple((0,) * m for _ in range(m)))

    def _check(self, other: "LieElement"):
        if (self.m, self.p) != (other.m, other.p):
            raise ContextMismatchError(
                f"gl_{self.m} at p={self.p} vs gl_{other.m} at p={other.p}")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        return LieElement(self.m, self.p, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.mat, other.mat)))

    def __sub__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        return LieElement(self.m, self.p, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.mat, other.mat)))

    def __neg__(self) -> "LieElement":
        return self.scale(-1)

    def scale(self, c: int) -> "LieElement":
        return LieElement(self.m, self.p, tuple(tuple(c * a for a in r) for r in self.mat))

    __rmul__ = scale

    def trace(self) -> int:
        return sum(self.mat[i][i] for i in range(self.m))

    def is_sl(self) -> bool:
        return self.trace() == 0

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.mat for x in r)

    def flat(self) -> tuple[int, ...]:
        return tuple(x for r in self.mat for x in r)

    def to_padic(self, ctx: PadicContext) -> PadicMatrix:
        return PadicMatrix(ctx, self.m, self.flat())


def elementary(m: int, p: int, i: int, j: int, coeff: int = 1) -> LieElement:
    """coeff * E_ij(p) with 1-based indices."""
    scale = p ** (1 + epsilon(p))
    return LieElement(m, p, tuple(
        tuple(coeff * scale if (r, c) == (i - 1, j - 1) else 0 for c in range(m))
        for r in range(m)))


def bracket(a: LieElement, b: LieElement) -> LieElement:
    """The commutator AB - BA."""
    a._check(b)
    ab = _matmul(a.mat, b.mat)
    ba = _matmul(b.mat, a.mat)
    return LieElement(a.m, a.p, tuple(
        tuple(x - y for x, y in zip(r, s)) for r, s in zip(ab, ba)))


def standard_generators(m: int, p: int) -> tuple[LieElement, LieElement]:
    """Two generators of sl_m(Q_p).

    m = 2: (E12(p) + E21(p), E11(p) - E22(p)).
    m >= 3: z1 = sum E_{i,i+1}(p); z2 = E_{m,1}(p) for odd m and
    E_{m-1,1}(p) + E_{m,2}(p) for even m.
    """
    if m < 2:
        raise ValueError(f"standard generators need m >= 2, got {m}")
    if m == 2:
        return (elementary(2, p, 1, 2) + elementary(2, p, 2, 1),
                elementary(2, p, 1, 1) - elementary(2, p, 2, 2))
    z1 = LieElement.zero(m, p)
    for i in range(1, m):
        z1 = z1 + elementary(m, p, i, i + 1)
    if m % 2:
        z2 = elementary(m, p, m, 1)
    else:
        z2 = elementary(m, p, m - 1, 1) + elementary(m, p, m, 2)
    return z1, z2


def w_valuation(x: LieElement) -> int | float:
    """Largest k with x in p^k gl_m (INF for zero)."""
    if x.is_zero():
        return INF
    v = min(val_p(a, x.p) for r in x.mat for a in r if a)
    return v - 1 - epsilon(x.p)


# -- exact rational span closure ---------------------------------------------

def _primitive(v: list[int]) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g > 1:
        v = [x // g for x in v]
    for x in v:
        if x:
            if x < 0:
                v = [-y for y in v]
            break
    return v


class _Echelon:
    """Incremental echelon form over Q, kept as primitive integer rows.

    Row r is zero at the pivot columns of every earlier row, so reducing a
    vector against the rows in insertion order leaves it zero at all pivots.
    """

    def __init__(self):
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []

    def reduce(self, v: Sequence[int]) -> list[int]:
        v = list(v)
        for row, c in zip(self.rows, self.pivots):
            if v[c]:
                a, b = row[c], v[c]
                v = [a * x - b * y for x, y in zip(v, row)]
                v = _primitive(v)
        return v

    def add(self, v: Sequence[int]) -> bool:
        r = self.reduce(v)
        if not any(r):
            return False
        r = _primitive(r)
        self.rows.append(r)
        self.pivots.append(next(i for i, x in enumerate(r) if x))
        return True

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class SpanBasis:
    """Basis of a Q-subspace of gl_m(Q), as primitive integer matrices.

    Integer rows are the canonical representatives of rational lines, so
    the basis is exact; it is in echelon form (distinct leading columns).
    """

    m: int
    p: int
    basis: tuple[Matrix, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, x) -> bool:
        ech = _Echelon()
        for b in self.basis:
            ech.add([a for r in b for a in r])
        flat = x.flat() if isinstance(x, LieElement) else [a for r in x for a in r]
        return not any(ech.reduce(flat))


def _to_matrix(v: Sequence[int], m: int) -> Matrix:
    return tuple(tuple(v[i * m:(i + 1) * m]) for i in range(m))


def rational_rank(elements: Sequence[LieElement]) -> int:
    ech = _Echelon()
    for e in elements:
        ech.add(e.flat())
    return len(ech)


def bracket_closure(gens: Sequence[LieElement], max_dim: int | None = None) -> SpanBasis:
    """Smallest Q-subspace containing ``gens`` and closed under the bracket.

    New basis elements are processed FIFO; each is bracketed against every
    element processed before it, so all pairs are covered exactly once.
    """
    if not gens:
        raise ValueError("bracket_closure needs at least one generator")
    m, p = gens[0].m, gens[0].p
    for g in gens:
        gens[0]._check(g)
    if max_dim is None:
        max_dim = m * m
    ech = _Echelon()
    elements: list[LieElement] = []

    def push(x: LieElement):
        if ech.add(x.flat()):
            if len(ech) > max_dim:
                raise ClosureError(f"closure dimension exceeded max_dim={max_dim}")
            elements.append(x)

    for g in gens:
        push(g)
    i = 0
    while i < len(elements):
        xi = elements[i]
        for j in range(i):
            push(bracket(elements[j], xi))
        i += 1
    return SpanBasis(m, p, tuple(_to_matrix(r, m) for r in ech.rows))


# -- valuation normalization --------------------------------------------------

def _residue_image(x: LieElement, k: int) -> list[int]:
    """Image of x in p^k gl_m / p^(k+1) gl_m as a vector over F_p."""
    d = x.p ** (1 + epsilon(x.p) + k)
    return [(a // d) % x.p for a in x.flat()]


def fp_independent(x: LieElement, y: LieElement, k: int) -> bool:
    """Are the images of x and y in p^k gl / p^(k+1) gl independent over F_p?"""
    u, v = _residue_image(x, k), _residue_image(y, k)
    p = x.p
    if not any(u) or not any(v):
        return False
    c = next(i for i, a in enumerate(v) if a)
    ratio = u[c] * pow(v[c], -1, p) % p
    return any((a - ratio * b) % p for a, b in zip(u, v))


def normalize_generators(x: LieElement, y: LieElement,
                         precision_budget: int = 64) -> tuple[LieElement, LieElement, int]:
    """Bring a generating pair to a common valuation k with F_p-independent images.

    First the lower-valuation element is multiplied by a power of p.  While
    x ≡ a*y mod p^(k+1) gl for a unit a, x is replaced by x - a*y and y by
    the p-power multiple matching the new valuation of x.
    """
    x._check(y)
    if rational_rank([x, y]) < 2:
        raise NormalizationError(
            "generators are linearly dependent: span is abelian, normalization cannot terminate")
    wx, wy = w_valuation(x), w_valuation(y)
    if wx < wy:
        x = x.scale(x.p ** (wy - wx))
    elif wy < wx:
        y = y.scale(y.p ** (wx - wy))
    k = max(wx, wy)
    p = x.p
    steps = 0
    while not fp_independent(x, y, k):
        steps += 1
        if steps > precision_budget:
            raise NormalizationError(
                f"normalization did not terminate within budget {precision_budget}")
        u, v = _residue_image(x, k), _residue_image(y, k)
        c = next(i for i, a in enumerate(v) if a)
        a0 = u[c] * pow(v[c], -1, p) % p
        x = x - y.scale(a0)
        wx = w_valuation(x)
        y = y.scale(p ** (wx - k))
        k = wx
    return x, y, k
